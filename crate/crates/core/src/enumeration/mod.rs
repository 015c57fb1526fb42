//! Enumeration of the matrix classes representable in a window `(n, m, k)`.
//!
//! Candidates come from [`generate`] already sorted so that the first member
//! of each class is its canonical representative. Classification buckets
//! candidates by a closure fingerprint (the sharp closures of every two-column
//! probe relation in the window's column universe, which only depend on the
//! class) and confirms membership with mutual implication checks.

pub mod checkpoint;
pub mod generate;
pub mod poset;

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Instant;

use log::{debug, info};
use rayon::prelude::*;
use thiserror::Error;

use crate::closure::{ClosureEngine, ClosureError, ColumnSet, ColumnUniverse, Goal, Hypotheses};
use crate::degeneracy::{degeneracy_class, Degeneracy};
use crate::localization::{localize, localizes_to, LocalizationError};
use crate::matrix::{parse_matrix, Entry, ExtendedMatrix};

pub use checkpoint::Checkpoint;
pub use generate::{generate, CandidateStream, Window};
pub use poset::{ClassNode, Group, PosetGraph};

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Localization(#[from] LocalizationError),
    #[error("checkpoint rejected: {0}")]
    Checkpoint(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Sharp closures of a fixed family of probe relations under one matrix.
pub type Fingerprint = Vec<u64>;

/// Probe families grow until they would exceed this many relations.
pub const PROBE_BUDGET: usize = 160;

/// Computes fingerprints in a fixed column universe.
///
/// The probes are the relations `{∗} ∪ X` for sets `X` of at most `size`
/// non-`∗` columns, one per orbit under permuting coordinates and renaming
/// variables. By default `size` is the largest value keeping the family
/// within [`PROBE_BUDGET`]. Sharp closure commutes with both symmetries, so
/// the closures of one orbit member determine the rest.
pub struct Fingerprinter {
    universe: ColumnUniverse,
    probes: Vec<ColumnSet>,
}

impl Fingerprinter {
    pub fn new(arity: usize, vars: usize) -> Result<Self, ClosureError> {
        let mut best = Fingerprinter::with_probe_size(arity, vars, 1)?;
        let columns = best.universe.size() - 1;
        for size in 2..=columns.min(6) {
            let next = Fingerprinter::with_probe_size(arity, vars, size)?;
            if next.probe_count() > PROBE_BUDGET {
                break;
            }
            best = next;
        }
        Ok(best)
    }

    pub fn with_probe_size(arity: usize, vars: usize, size: usize) -> Result<Self, ClosureError> {
        let universe = ColumnUniverse::new(arity, vars)?;
        let symmetries = symmetries(&universe);
        let mut seen = std::collections::HashSet::new();
        let mut probes = Vec::new();
        let total = universe.size() as u32;
        let mut subset: Vec<u32> = Vec::new();
        probe_subsets(1, total, size, &mut subset, &mut |set: &[u32]| {
            let canon = symmetries
                .iter()
                .map(|perm| {
                    let mut img: Vec<u32> = set.iter().map(|&c| perm[c as usize]).collect();
                    img.sort_unstable();
                    img
                })
                .min()
                .expect("identity symmetry");
            if seen.insert(canon) {
                let mut s = ColumnSet::with_star(universe.size());
                for &c in set {
                    s.insert(c);
                }
                probes.push(s);
            }
        });
        Ok(Fingerprinter { universe, probes })
    }

    pub fn for_window(w: &Window) -> Result<Self, ClosureError> {
        Fingerprinter::new(w.rows, w.vars)
    }

    pub fn probe_count(&self) -> usize {
        self.probes.len()
    }

    pub fn fingerprint(&self, m: &ExtendedMatrix) -> Result<Fingerprint, ClosureError> {
        let engine = ClosureEngine::new(std::slice::from_ref(m), self.universe.clone())?;
        let mut out = Vec::new();
        for p in &self.probes {
            out.extend_from_slice(engine.close(p).words());
        }
        Ok(out)
    }
}

fn probe_subsets(from: u32, total: u32, left: usize, cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if !cur.is_empty() {
        f(cur);
    }
    if left == 0 {
        return;
    }
    for c in from..total {
        cur.push(c);
        probe_subsets(c + 1, total, left - 1, cur, f);
        cur.pop();
    }
}

/// Every coordinate permutation combined with every variable renaming, as
/// a permutation of column codes.
fn symmetries(u: &ColumnUniverse) -> Vec<Vec<u32>> {
    let coords = permutations(u.arity());
    let vars = permutations(u.vars());
    let mut out = Vec::with_capacity(coords.len() * vars.len());
    for cp in &coords {
        for vp in &vars {
            let perm = (0..u.size() as u32)
                .map(|c| {
                    let col = u.decode(c);
                    let img: Vec<Entry> = cp
                        .iter()
                        .map(|&i| match col[i] {
                            Entry::Star => Entry::Star,
                            Entry::Var(v) => Entry::Var(vp[v as usize - 1] as u8 + 1),
                        })
                        .collect();
                    u.encode(&img)
                })
                .collect();
            out.push(perm);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..n {
        let mut next = Vec::with_capacity(out.len() * (k + 1));
        for p in &out {
            for pos in 0..=k {
                let mut q = p.clone();
                q.insert(pos, k);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// `a ⊇ b` probe by probe; necessary for the implication from `a`'s matrix
/// to `b`'s.
pub fn covers(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| y & !x == 0)
}

/// Both directions of the implication between two non-trivial matrices.
fn equivalent(a: &ExtendedMatrix, b: &ExtendedMatrix) -> Result<bool, ClosureError> {
    Ok(implies_one(a, b)? && implies_one(b, a)?)
}

fn implies_one(a: &ExtendedMatrix, b: &ExtendedMatrix) -> Result<bool, ClosureError> {
    crate::closure::implies(std::slice::from_ref(a), std::slice::from_ref(b))
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub workers: usize,
    /// Compute localization groups.
    pub groups: bool,
    /// Compute the inclusion order and its reduction.
    pub order: bool,
    /// Directory for resumable state.
    pub checkpoint: Option<PathBuf>,
    /// Candidates between checkpoint writes.
    pub checkpoint_every: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            workers: 1,
            groups: true,
            order: true,
            checkpoint: None,
            checkpoint_every: 20_000,
        }
    }
}

impl ClassifyOptions {
    pub fn counts_only() -> Self {
        ClassifyOptions {
            groups: false,
            order: false,
            ..ClassifyOptions::default()
        }
    }
}

const CHUNK: usize = 1024;

struct Prepared {
    fingerprint: Fingerprint,
    goal: Goal,
}

impl Prepared {
    fn new(fpr: &Fingerprinter, m: &ExtendedMatrix) -> Result<Self, ClosureError> {
        Ok(Prepared {
            fingerprint: fpr.fingerprint(m)?,
            goal: Goal::new(m)?,
        })
    }
}

struct ClassTable {
    reps: Vec<usize>,
    members: Vec<usize>,
    min_cols: Vec<usize>,
    kinds: Vec<Degeneracy>,
    fingerprints: Vec<Option<Fingerprint>>,
    goals: Vec<Option<Goal>>,
    hyps: Vec<Option<Hypotheses>>,
    buckets: HashMap<Fingerprint, Vec<usize>>,
    bottom: Option<usize>,
    top: Option<usize>,
}

impl ClassTable {
    fn new() -> Self {
        ClassTable {
            reps: Vec::new(),
            members: Vec::new(),
            min_cols: Vec::new(),
            kinds: Vec::new(),
            fingerprints: Vec::new(),
            goals: Vec::new(),
            hyps: Vec::new(),
            buckets: HashMap::new(),
            bottom: None,
            top: None,
        }
    }

    fn open(&mut self, cands: &[ExtendedMatrix], rep: usize, kind: Degeneracy, prep: Option<Prepared>) -> usize {
        let id = self.reps.len();
        self.reps.push(rep);
        self.members.push(0);
        self.min_cols.push(cands[rep].left_cols());
        self.kinds.push(kind);
        match kind {
            Degeneracy::Trivial => self.bottom = Some(id),
            Degeneracy::AntiTrivial => self.top = Some(id),
            Degeneracy::Proper => {
                let p = prep.as_ref().expect("proper classes are prepared");
                self.buckets.entry(p.fingerprint.clone()).or_default().push(id);
            }
        }
        let (fp, goal) = match prep {
            Some(p) => (Some(p.fingerprint), Some(p.goal)),
            None => (None, None),
        };
        self.fingerprints.push(fp);
        self.goals.push(goal);
        self.hyps.push((kind == Degeneracy::Proper).then(|| Hypotheses::new(std::slice::from_ref(&cands[rep]))));
        id
    }
}

/// Partitions the candidates into classes and builds the poset.
pub fn classify(stream: &CandidateStream, opts: &ClassifyOptions) -> Result<PosetGraph, EnumerationError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| EnumerationError::Parameters(e.to_string()))?;
    pool.install(|| classify_in_pool(stream, opts))
}

fn classify_in_pool(stream: &CandidateStream, opts: &ClassifyOptions) -> Result<PosetGraph, EnumerationError> {
    let started = Instant::now();
    let cands = stream.as_slice();
    let fpr = Fingerprinter::for_window(&stream.window)?;
    let mut table = ClassTable::new();
    let mut start = 0;

    if let Some(dir) = &opts.checkpoint {
        if let Some(cp) = checkpoint::load(dir, stream)? {
            info!("resuming {} at candidate {}/{}", stream.window, cp.next, cands.len());
            for &(rep, members, min_cols) in &cp.classes {
                let kind = degeneracy_class(&cands[rep]);
                let prep = match kind {
                    Degeneracy::Proper => Some(Prepared::new(&fpr, &cands[rep])?),
                    _ => None,
                };
                let id = table.open(cands, rep, kind, prep);
                table.members[id] = members;
                table.min_cols[id] = min_cols;
            }
            start = cp.next;
        }
    }

    let mut since_save = 0;
    let mut pos = start;
    while pos < cands.len() {
        let end = (pos + CHUNK).min(cands.len());
        let t0 = Instant::now();
        let prepared: Vec<(Degeneracy, Option<Prepared>)> = cands[pos..end]
            .par_iter()
            .map(|c| {
                let kind = degeneracy_class(c);
                let prep = match kind {
                    Degeneracy::Proper => Some(Prepared::new(&fpr, c)),
                    _ => None,
                };
                (kind, prep)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|(k, p)| p.transpose().map(|p| (k, p)))
            .collect::<Result<_, _>>()?;

        let t_fp = t0.elapsed();
        let mut checks = 0usize;
        for (off, (kind, prep)) in prepared.into_iter().enumerate() {
            let idx = pos + off;
            let found = match kind {
                Degeneracy::Trivial => table.bottom,
                Degeneracy::AntiTrivial => table.top,
                Degeneracy::Proper => {
                    let p = prep.as_ref().expect("proper");
                    let mut hyp = Hypotheses::new(std::slice::from_ref(&cands[idx]));
                    let mut hit = None;
                    let bucket = table.buckets.get(&p.fingerprint).cloned().unwrap_or_default();
                    for cid in bucket {
                        checks += 1;
                        let goal = table.goals[cid].as_ref().expect("proper");
                        if hyp.implies(goal)? && table.hyps[cid].as_mut().expect("proper").implies(&p.goal)? {
                            hit = Some(cid);
                            break;
                        }
                    }
                    hit
                }
            };
            let cid = match found {
                Some(cid) => cid,
                None => table.open(cands, idx, kind, prep),
            };
            table.members[cid] += 1;
            table.min_cols[cid] = table.min_cols[cid].min(cands[idx].left_cols());
        }
        since_save += end - pos;
        pos = end;
        debug!(
            "{}: {pos}/{} candidates, {} classes (fingerprints {:.1?}, {checks} checks {:.1?})",
            stream.window,
            cands.len(),
            table.reps.len(),
            t_fp,
            t0.elapsed() - t_fp
        );
        if let Some(dir) = &opts.checkpoint {
            if since_save >= opts.checkpoint_every || pos == cands.len() {
                checkpoint::save(dir, stream, pos, &table.reps, &table.members, &table.min_cols)?;
                since_save = 0;
            }
        }
    }
    info!(
        "{}: {} candidates, {} classes in {:.1?}",
        stream.window,
        cands.len(),
        table.reps.len(),
        started.elapsed()
    );

    let classes: Vec<ClassNode> = table
        .reps
        .iter()
        .zip(&table.members)
        .zip(&table.min_cols)
        .map(|((&r, &members), &min_cols)| ClassNode {
            canonical: cands[r].clone(),
            members,
            min_cols,
        })
        .collect();

    let mut graph = PosetGraph {
        params: stream.requested,
        classes,
        edges: Vec::new(),
        reduced_edges: Vec::new(),
        groups: Vec::new(),
    };
    if opts.order {
        graph.edges = order_edges(&graph, &table)?;
        graph.reduced_edges = poset::transitive_reduction(graph.classes.len(), &graph.edges);
        info!("{}: {} order edges, {} in the reduction", stream.window, graph.edges.len(), graph.reduced_edges.len());
    }
    if opts.groups {
        graph.groups = localization_groups(&graph, &stream.window)?;
    }
    Ok(graph)
}

/// All pairs `(a, b)`, `a ≠ b`, with `mclex∗{a} ⊆ mclex∗{b}`.
fn order_edges(g: &PosetGraph, table: &ClassTable) -> Result<Vec<(usize, usize)>, EnumerationError> {
    let n = g.classes.len();
    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Vec<usize>, ClosureError> {
            let mut out = Vec::new();
            let mut hyp = Hypotheses::new(std::slice::from_ref(&g.classes[i].canonical));
            for j in 0..n {
                if i == j {
                    continue;
                }
                let holds = match (table.kinds[i], table.kinds[j]) {
                    (Degeneracy::Trivial, _) => true,
                    (_, Degeneracy::AntiTrivial) => true,
                    (_, Degeneracy::Trivial) | (Degeneracy::AntiTrivial, _) => false,
                    (Degeneracy::Proper, Degeneracy::Proper) => {
                        let fi = table.fingerprints[i].as_ref().expect("proper");
                        let fj = table.fingerprints[j].as_ref().expect("proper");
                        covers(fi, fj) && hyp.implies(table.goals[j].as_ref().expect("proper"))?
                    }
                };
                if holds {
                    out.push(j);
                }
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    Ok(rows
        .into_iter()
        .enumerate()
        .flat_map(|(i, js)| js.into_iter().map(move |j| (i, j)))
        .collect())
}

/// Named non-pointed matrices used to caption localization groups.
pub fn loc_anchors() -> Vec<(&'static str, ExtendedMatrix)> {
    [
        ("Mal'tsev", "1 2 2 | 1 ; 2 2 1 | 1"),
        ("majority", "2 1 1 | 1 ; 1 2 1 | 1 ; 1 1 2 | 1"),
        ("arithmetical", "1 2 2 | 1 ; 2 2 1 | 1 ; 1 2 1 | 1"),
        ("minority", "1 2 2 | 1 ; 2 1 2 | 1 ; 2 2 1 | 1"),
    ]
    .into_iter()
    .map(|(name, text)| (name, parse_matrix(text).expect("anchor literal")))
    .collect()
}

pub const BOTTOM_GROUP: &str = "preorders";
pub const TOP_GROUP: &str = "all categories";

/// Caption for the localization group of `rep`.
pub fn group_label(rep: &ExtendedMatrix) -> Result<String, EnumerationError> {
    match degeneracy_class(rep) {
        Degeneracy::Trivial => return Ok(BOTTOM_GROUP.into()),
        Degeneracy::AntiTrivial => return Ok(TOP_GROUP.into()),
        Degeneracy::Proper => {}
    }
    for (name, anchor) in loc_anchors() {
        if localizes_to(rep, &anchor)? {
            return Ok(name.into());
        }
    }
    Ok(format!("loc: {}", localize(rep).result.normalize()))
}

/// Groups classes by Bourn localization.
fn localization_groups(g: &PosetGraph, window: &Window) -> Result<Vec<Group>, EnumerationError> {
    let fpr = Fingerprinter::new(window.rows, window.vars + 1)?;
    let kinds: Vec<Degeneracy> = g.classes.iter().map(|c| degeneracy_class(&c.canonical)).collect();
    let locs: Vec<Option<(ExtendedMatrix, Fingerprint)>> = g
        .classes
        .par_iter()
        .zip(kinds.par_iter())
        .map(|(c, k)| -> Result<_, ClosureError> {
            if *k != Degeneracy::Proper {
                return Ok(None);
            }
            let l = localize(&c.canonical).result;
            let fp = fpr.fingerprint(&l)?;
            Ok(Some((l, fp)))
        })
        .collect::<Result<_, _>>()?;

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_kind: Vec<Degeneracy> = Vec::new();
    let mut buckets: HashMap<&Fingerprint, Vec<usize>> = HashMap::new();
    for (i, kind) in kinds.iter().enumerate() {
        let gid = match kind {
            Degeneracy::Proper => {
                let (l, fp) = locs[i].as_ref().expect("proper");
                let mut hit = None;
                if let Some(b) = buckets.get(fp) {
                    for &gid in b {
                        let (rl, _) = locs[groups[gid][0]].as_ref().expect("proper");
                        if equivalent(l, rl)? {
                            hit = Some(gid);
                            break;
                        }
                    }
                }
                hit.unwrap_or_else(|| {
                    buckets.entry(fp).or_default().push(groups.len());
                    groups.push(Vec::new());
                    group_kind.push(*kind);
                    groups.len() - 1
                })
            }
            k => match group_kind.iter().position(|gk| gk == k) {
                Some(gid) => gid,
                None => {
                    groups.push(Vec::new());
                    group_kind.push(*k);
                    groups.len() - 1
                }
            },
        };
        groups[gid].push(i);
    }
    groups
        .into_iter()
        .map(|ids| {
            Ok(Group {
                label: group_label(&g.classes[ids[0]].canonical)?,
                class_ids: ids,
            })
        })
        .collect()
}

/// Enumerates and classifies a window.
pub fn enumerate(rows: usize, cols: usize, vars: usize, opts: &ClassifyOptions) -> Result<PosetGraph, EnumerationError> {
    classify(&generate(rows, cols, vars)?, opts)
}

/// Number of classes in a window.
pub fn class_count(rows: usize, cols: usize, vars: usize) -> Result<usize, EnumerationError> {
    Ok(enumerate(rows, cols, vars, &ClassifyOptions::counts_only())?.classes.len())
}

/// The `(rows, cols, vars)`-canonical matrix of `m`'s class: the first
/// candidate of the window equivalent to `m`.
pub fn canonical(m: &ExtendedMatrix, rows: usize, cols: usize, vars: usize) -> Result<ExtendedMatrix, EnumerationError> {
    let w = Window::new(rows, cols, vars)?;
    if !w.contains(m) {
        return Err(EnumerationError::Parameters(format!("{m} does not fit in {w}")));
    }
    let stream = generate(rows, cols, vars)?;
    let kind = degeneracy_class(m);
    let fpr = Fingerprinter::for_window(&stream.window)?;
    let target = match kind {
        Degeneracy::Proper => Some(fpr.fingerprint(m)?),
        _ => None,
    };
    for c in &stream {
        let ck = degeneracy_class(c);
        if ck != kind {
            continue;
        }
        match &target {
            None => return Ok(c.clone()),
            Some(fp) => {
                if fpr.fingerprint(c)? == *fp && equivalent(c, m)? {
                    return Ok(c.clone());
                }
            }
        }
    }
    Err(EnumerationError::Parameters(format!("no member of the class of {m} found in {w}")))
}

/// Restriction of `g` to the classes whose localization is `mclex{anchor}`.
pub fn subposet_by_localization(g: &PosetGraph, anchor: &ExtendedMatrix) -> Result<PosetGraph, EnumerationError> {
    let keep: Vec<bool> = g
        .classes
        .par_iter()
        .map(|c| localizes_to(&c.canonical, anchor))
        .collect::<Result<_, _>>()?;
    Ok(g.restrict(&keep))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> ExtendedMatrix {
        parse_matrix(s).unwrap()
    }

    #[test]
    fn degenerate_windows_have_two_classes() {
        assert_eq!(class_count(3, 0, 2).unwrap(), 2);
        assert_eq!(class_count(3, 1, 2).unwrap(), 2);
        assert_eq!(class_count(1, 4, 2).unwrap(), 2);
        assert_eq!(class_count(3, 4, 0).unwrap(), 1);
    }

    #[test]
    fn two_rows_three_columns() {
        let g = enumerate(2, 3, 2, &ClassifyOptions::default()).unwrap();
        assert_eq!(g.classes.len(), 6);
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canonical(&m("1 * * | 1 ; 2 2 1 | 1"), 2, 3, 2).unwrap().to_text(), "1 * * | 1 ; 2 1 2 | 1");
        assert_eq!(canonical(&m("* | 1"), 1, 1, 1).unwrap().to_text(), "| 1");
        assert_eq!(canonical(&m("1 | 1"), 2, 2, 1).unwrap().to_text(), "| *");
    }

    #[test]
    fn fingerprints_cover_along_implications() {
        let f = Fingerprinter::new(2, 2).unwrap();
        let maltsev = f.fingerprint(&m("1 2 2 | 1 ; 2 2 1 | 1")).unwrap();
        let su = f.fingerprint(&m("1 * * | 1 ; 2 2 1 | 1")).unwrap();
        assert!(covers(&maltsev, &su));
    }
}
