//! The closure engine behind the implication decision procedure.
//!
//! For a goal matrix `N` with `n` rows over `{∗, x1, .., xk}` the engine works
//! in the universe of all `(k+1)^n` columns. Starting from the left columns
//! of `N` plus the all-`∗` column, it repeatedly adds the right column of every
//! row-wise interpretation of a hypothesis matrix whose left columns are
//! already present. The least fixpoint is the smallest relation that is sharp
//! for every hypothesis; the implication holds iff it contains `N`'s right
//! column (or some hypothesis is trivial).
//!
//! Interpretations are assembled coordinate by coordinate from precomputed
//! instantiated rows. A partial assembly is abandoned as soon as one of its
//! partial left columns is not a prefix of a column in the current relation.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degeneracy::is_trivial;
use crate::matrix::{Entry, ExtendedMatrix};

/// Columns are encoded with coordinate 0 as the least significant digit.
pub type ColumnCode = u32;

/// Largest universe the engine will allocate.
pub const MAX_UNIVERSE: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("column universe ({base}^{arity}) is too large")]
    UniverseTooLarge { arity: usize, base: usize },
    #[error("a hypothesis matrix uses {vars} variables; at most 255 are supported")]
    TooManyVariables { vars: usize },
}

/// All `n`-tuples over `{∗, x1, .., xk}`, numbered in base `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnUniverse {
    arity: usize,
    base: usize,
    size: usize,
    pow: Vec<ColumnCode>,
}

impl ColumnUniverse {
    /// The code of the all-`∗` column.
    pub const STAR: ColumnCode = 0;

    pub fn new(arity: usize, vars: usize) -> Result<Self, ClosureError> {
        let base = vars + 1;
        let mut size: usize = 1;
        let mut pow = Vec::with_capacity(arity + 1);
        for _ in 0..arity {
            pow.push(size as ColumnCode);
            size = size
                .checked_mul(base)
                .filter(|&s| s <= MAX_UNIVERSE)
                .ok_or(ClosureError::UniverseTooLarge { arity, base })?;
        }
        pow.push(size as ColumnCode);
        Ok(ColumnUniverse {
            arity,
            base,
            size,
            pow,
        })
    }

    /// The universe in which `goal` is decided. Unused declared variables
    /// are left out; they never change the verdict.
    pub fn for_goal(goal: &ExtendedMatrix) -> Result<Self, ClosureError> {
        ColumnUniverse::new(goal.rows(), goal.max_var())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn vars(&self) -> usize {
        self.base - 1
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn encode(&self, column: &[Entry]) -> ColumnCode {
        debug_assert_eq!(column.len(), self.arity);
        column
            .iter()
            .enumerate()
            .map(|(i, e)| e.code() as ColumnCode * self.pow[i])
            .sum()
    }

    pub fn decode(&self, mut code: ColumnCode) -> Vec<Entry> {
        let base = self.base as ColumnCode;
        (0..self.arity)
            .map(|_| {
                let d = code % base;
                code /= base;
                Entry::from_code(d as u8)
            })
            .collect()
    }

    /// `col∗(N)`: the left columns of `goal` together with the all-`∗` column.
    pub fn star_columns(&self, goal: &ExtendedMatrix) -> ColumnSet {
        let mut set = ColumnSet::with_star(self.size);
        for c in goal.left_columns() {
            set.insert(self.encode(&c));
        }
        set
    }
}

/// A set of columns, stored as a bitset over a [`ColumnUniverse`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnSet {
    words: Vec<u64>,
}

impl ColumnSet {
    pub fn empty(universe_size: usize) -> Self {
        ColumnSet {
            words: vec![0; universe_size.div_ceil(64).max(1)],
        }
    }

    /// The pointed relation containing only the all-`∗` column.
    pub fn with_star(universe_size: usize) -> Self {
        let mut s = ColumnSet::empty(universe_size);
        s.insert(ColumnUniverse::STAR);
        s
    }

    #[inline]
    pub fn contains(&self, c: ColumnCode) -> bool {
        let c = c as usize;
        self.words[c >> 6] >> (c & 63) & 1 == 1
    }

    /// Inserts `c`; returns true if it was absent.
    #[inline]
    pub fn insert(&mut self, c: ColumnCode) -> bool {
        let c = c as usize;
        let w = &mut self.words[c >> 6];
        let bit = 1u64 << (c & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ColumnSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &ColumnSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ColumnCode> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros();
                bits &= bits - 1;
                Some((wi * 64 + t as usize) as ColumnCode)
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for ColumnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// One row of a hypothesis matrix pushed through a pointed map into the
/// target alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstantiatedRow {
    /// Index of the source matrix in the hypothesis list.
    pub matrix: usize,
    /// Row of the source matrix.
    pub row: usize,
    /// `map[v - 1]` is the image of `x_v`; `∗` always maps to `∗`.
    pub map: Vec<Entry>,
    /// The resulting row, right entry last.
    pub tuple: Vec<Entry>,
}

/// Every row of every hypothesis under every pointed map into
/// `{∗, x1, .., x_vars}`, deduplicated by resulting tuple per source matrix.
///
/// Maps range over the variables a matrix actually uses. Rows come out in
/// source order and maps in odometer order (first variable fastest), keeping
/// the first occurrence of each tuple.
pub fn build_instantiated_rows(s: &[ExtendedMatrix], vars: usize) -> Vec<Vec<InstantiatedRow>> {
    s.iter()
        .enumerate()
        .map(|(mi, m)| {
            let kv = m.max_var();
            let mut seen = std::collections::HashSet::new();
            let mut out = Vec::new();
            for r in 0..m.rows() {
                let row = m.row(r);
                let mut map = vec![0u8; kv];
                loop {
                    let tuple: Vec<Entry> = row
                        .iter()
                        .map(|&e| match e {
                            Entry::Star => Entry::Star,
                            Entry::Var(v) => Entry::from_code(map[v as usize - 1]),
                        })
                        .collect();
                    if seen.insert(tuple.clone()) {
                        out.push(InstantiatedRow {
                            matrix: mi,
                            row: r,
                            map: map.iter().map(|&c| Entry::from_code(c)).collect(),
                            tuple,
                        });
                    }
                    if !odometer_step(&mut map, vars as u8) {
                        break;
                    }
                }
            }
            out
        })
        .collect()
}

/// Advances a little-endian counter with digits `0..=max`; false on wrap-around.
fn odometer_step(digits: &mut [u8], max: u8) -> bool {
    for d in digits.iter_mut() {
        if *d < max {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

struct Generator {
    width: usize,
    /// Flattened tuples of symbol codes, `width` per tuple.
    tuples: Vec<u8>,
    origins: Vec<InstantiatedRow>,
}

impl Generator {
    fn len(&self) -> usize {
        self.origins.len()
    }

    #[inline]
    fn tuple(&self, t: usize) -> &[u8] {
        &self.tuples[t * self.width..(t + 1) * self.width]
    }
}

/// One interpretation found during a pass.
struct Hit<'a> {
    generator: usize,
    choice: &'a [usize],
    columns: &'a [ColumnCode],
}

/// A hypothesis set compiled for one target universe.
///
/// Compiling is the expensive part of a closure call, so callers that run
/// many closures against the same hypotheses should keep the engine around.
pub struct ClosureEngine {
    universe: ColumnUniverse,
    hypotheses: Vec<ExtendedMatrix>,
    generators: Vec<Generator>,
}

/// Result of a closure computation.
#[derive(Clone, Debug)]
pub struct ClosureRun {
    pub columns: ColumnSet,
    /// Columns added, in order, with the interpretation that produced them.
    pub log: Vec<LoggedStep>,
    /// True when the run stopped because the target column appeared.
    pub reached_target: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoggedStep {
    pub added: ColumnCode,
    pub matrix: usize,
    /// Index into the matrix's instantiated rows, one per coordinate.
    pub rows: Vec<usize>,
    pub consumed: Vec<ColumnCode>,
    /// Pass (1-based) in which the column first appeared.
    pub pass: usize,
}

impl ClosureEngine {
    pub fn new(hypotheses: &[ExtendedMatrix], universe: ColumnUniverse) -> Result<Self, ClosureError> {
        if let Some(m) = hypotheses.iter().find(|m| m.max_var() > 255) {
            return Err(ClosureError::TooManyVariables { vars: m.max_var() });
        }
        let generators = build_instantiated_rows(hypotheses, universe.vars())
            .into_iter()
            .zip(hypotheses)
            .map(|(rows, m)| {
                let width = m.width();
                let mut tuples = Vec::with_capacity(rows.len() * width);
                for r in &rows {
                    tuples.extend(r.tuple.iter().map(|e| e.code()));
                }
                Generator {
                    width,
                    tuples,
                    origins: rows,
                }
            })
            .collect();
        Ok(ClosureEngine {
            universe,
            hypotheses: hypotheses.to_vec(),
            generators,
        })
    }

    pub fn universe(&self) -> &ColumnUniverse {
        &self.universe
    }

    pub fn hypotheses(&self) -> &[ExtendedMatrix] {
        &self.hypotheses
    }

    /// The instantiated row behind a logged choice.
    pub fn instantiated_row(&self, matrix: usize, index: usize) -> &InstantiatedRow {
        &self.generators[matrix].origins[index]
    }

    /// Least fixpoint above `start` (which should contain the all-`∗` column).
    pub fn close(&self, start: &ColumnSet) -> ColumnSet {
        self.run(start, None, false).columns
    }

    /// Like [`close`](Self::close), but stops as soon as `target` is present.
    pub fn reaches(&self, start: &ColumnSet, target: ColumnCode) -> bool {
        if start.contains(target) {
            return true;
        }
        self.run(start, Some(target), false).reached_target
    }

    /// Runs passes of the one-step operator until nothing new appears or the
    /// target column is added. Each pass evaluates against a snapshot of the
    /// relation, so the columns added by pass `p` are exactly `S^p(R0) \ S^{p-1}(R0)`.
    pub fn run(&self, start: &ColumnSet, target: Option<ColumnCode>, record: bool) -> ClosureRun {
        let mut current = start.clone();
        let mut log = Vec::new();
        if let Some(t) = target {
            if current.contains(t) {
                return ClosureRun {
                    columns: current,
                    log,
                    reached_target: true,
                };
            }
        }
        let mut pass = 0;
        loop {
            pass += 1;
            let prefixes = self.prefix_sets(&current);
            let mut batch = current.clone();
            let mut added: Vec<ColumnCode> = Vec::new();
            let mut stop = false;
            for (gi, g) in self.generators.iter().enumerate() {
                if stop {
                    break;
                }
                self.scan(g, gi, &prefixes, &mut |hit: Hit<'_>| {
                    let right = hit.columns[hit.columns.len() - 1];
                    if batch.insert(right) {
                        added.push(right);
                        if record {
                            log.push(LoggedStep {
                                added: right,
                                matrix: hit.generator,
                                rows: hit.choice.to_vec(),
                                consumed: hit.columns[..hit.columns.len() - 1].to_vec(),
                                pass,
                            });
                        }
                        if Some(right) == target {
                            return true;
                        }
                    }
                    false
                }, &mut stop);
            }
            if added.is_empty() {
                return ClosureRun {
                    columns: current,
                    log,
                    reached_target: false,
                };
            }
            current = batch;
            if stop {
                return ClosureRun {
                    columns: current,
                    log,
                    reached_target: true,
                };
            }
        }
    }

    /// `prefixes[i]` holds the codes of `R` truncated to coordinates `0..=i`.
    fn prefix_sets(&self, r: &ColumnSet) -> Vec<ColumnSet> {
        let n = self.universe.arity;
        let mut out: Vec<ColumnSet> = (0..n)
            .map(|i| ColumnSet::empty(self.universe.pow[i + 1] as usize))
            .collect();
        for c in r.iter() {
            for (i, p) in out.iter_mut().enumerate().take(n - 1) {
                p.insert(c % self.universe.pow[i + 1]);
            }
        }
        out[n - 1] = r.clone();
        out
    }

    fn scan(
        &self,
        g: &Generator,
        gi: usize,
        prefixes: &[ColumnSet],
        on_hit: &mut dyn FnMut(Hit<'_>) -> bool,
        stop: &mut bool,
    ) {
        let n = self.universe.arity;
        let w = g.width;
        let left = w - 1;
        // partial[level * w + j]: column j assembled from coordinates < level.
        let mut partial = vec![0 as ColumnCode; (n + 1) * w];
        let mut choice = vec![0usize; n];
        // Explicit stack of next tuple index per level.
        let mut next = vec![0usize; n];
        let mut level = 0usize;
        let count = g.len();
        if count == 0 {
            return;
        }
        loop {
            if next[level] >= count {
                if level == 0 {
                    return;
                }
                level -= 1;
                continue;
            }
            let t = next[level];
            next[level] += 1;
            let tuple = g.tuple(t);
            let pw = self.universe.pow[level];
            let prefix = &prefixes[level];
            let (done, rest) = partial.split_at_mut((level + 1) * w);
            let base = &done[level * w..];
            let out = &mut rest[..w];
            let mut ok = true;
            for j in 0..left {
                let c = base[j] + tuple[j] as ColumnCode * pw;
                if !prefix.contains(c) {
                    ok = false;
                    break;
                }
                out[j] = c;
            }
            if !ok {
                continue;
            }
            out[left] = base[left] + tuple[left] as ColumnCode * pw;
            choice[level] = t;
            if level + 1 == n {
                let cols = &rest[..w];
                if !prefixes[n - 1].contains(cols[left])
                    && on_hit(Hit {
                        generator: gi,
                        choice: &choice,
                        columns: cols,
                    })
                {
                    *stop = true;
                    return;
                }
            } else {
                level += 1;
                next[level] = 0;
            }
        }
    }

    /// Rebuilds the part of `log` that `target` depends on. Working back from
    /// the target, each needed column gets the witness (among interpretations
    /// available before its pass) that consumes the fewest columns outside
    /// `start`; ties go to the first one found.
    fn lean_proof(&self, start: &ColumnSet, log: &[LoggedStep], target: ColumnCode) -> Vec<LoggedStep> {
        let pass_of: HashMap<ColumnCode, (usize, usize)> =
            log.iter().enumerate().map(|(i, s)| (s.added, (s.pass, i))).collect();
        let mut chosen: HashMap<ColumnCode, (usize, LoggedStep)> = HashMap::new();
        let mut stack = vec![target];
        while let Some(c) = stack.pop() {
            if start.contains(c) || chosen.contains_key(&c) {
                continue;
            }
            let (pass, order) = pass_of[&c];
            let mut before = start.clone();
            for s in log.iter().take_while(|s| s.pass < pass) {
                before.insert(s.added);
            }
            let prefixes = self.prefix_sets(&before);
            let mut best: Option<(usize, LoggedStep)> = None;
            for (gi, g) in self.generators.iter().enumerate() {
                let mut stop = false;
                self.scan(g, gi, &prefixes, &mut |hit: Hit<'_>| {
                    let w = hit.columns.len() - 1;
                    if hit.columns[w] != c {
                        return false;
                    }
                    let mut fresh: Vec<ColumnCode> =
                        hit.columns[..w].iter().copied().filter(|&x| !start.contains(x)).collect();
                    fresh.sort_unstable();
                    fresh.dedup();
                    if best.as_ref().is_none_or(|(b, _)| fresh.len() < *b) {
                        best = Some((
                            fresh.len(),
                            LoggedStep {
                                added: c,
                                matrix: hit.generator,
                                rows: hit.choice.to_vec(),
                                consumed: hit.columns[..w].to_vec(),
                                pass,
                            },
                        ));
                    }
                    best.as_ref().is_some_and(|(b, _)| *b == 0)
                }, &mut stop);
                if stop {
                    break;
                }
            }
            let (_, step) = best.expect("a logged column has a witness before its pass");
            stack.extend(step.consumed.iter().copied());
            chosen.insert(c, (order, step));
        }
        let mut steps: Vec<(usize, LoggedStep)> = chosen.into_values().collect();
        steps.sort_by_key(|(order, _)| *order);
        steps.into_iter().map(|(_, s)| s).collect()
    }

    /// Converts a run log into tableau steps.
    fn tableau_steps(&self, log: &[LoggedStep]) -> Vec<TableauStep> {
        let u = &self.universe;
        log.iter()
            .map(|s| TableauStep {
                added: u.decode(s.added),
                witnesses: s
                    .rows
                    .iter()
                    .map(|&t| {
                        let r = &self.generators[s.matrix].origins[t];
                        Witness {
                            matrix: r.matrix,
                            row: r.row,
                            map: r.map.clone(),
                        }
                    })
                    .collect(),
                consumed: s.consumed.iter().map(|&c| u.decode(c)).collect(),
            })
            .collect()
    }
}

/// Least fixpoint of the one-step operator of `s` above `start` in the
/// universe of `arity`-tuples over `vars` variables.
pub fn closure(
    s: &[ExtendedMatrix],
    universe: &ColumnUniverse,
    start: &ColumnSet,
) -> Result<ColumnSet, ClosureError> {
    Ok(ClosureEngine::new(s, universe.clone())?.close(start))
}

/// `col∗_S(N)`: the least `S`-sharp relation containing `col∗(N)`.
pub fn sharp_closure_of(s: &[ExtendedMatrix], goal: &ExtendedMatrix) -> Result<ColumnSet, ClosureError> {
    let u = ColumnUniverse::for_goal(goal)?;
    let start = u.star_columns(goal);
    closure(s, &u, &start)
}

/// One column added to the goal's left part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauStep {
    #[serde(with = "column_text")]
    pub added: Vec<Entry>,
    /// One instantiated row per coordinate; empty for the initial `∗` step.
    pub witnesses: Vec<Witness>,
    #[serde(with = "column_list_text")]
    pub consumed: Vec<Vec<Entry>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub matrix: usize,
    pub row: usize,
    #[serde(with = "column_text")]
    pub map: Vec<Entry>,
}

/// A replayable certificate for (or against) `mclex∗ S ⊆ mclex∗{goal}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauProof {
    pub goal: ExtendedMatrix,
    pub hypotheses: Vec<ExtendedMatrix>,
    pub steps: Vec<TableauStep>,
    pub verdict: bool,
}

impl TableauProof {
    /// The relation obtained by replaying every step from `col∗(goal)`.
    pub fn final_columns(&self) -> Result<ColumnSet, ClosureError> {
        let u = ColumnUniverse::for_goal(&self.goal)?;
        let mut set = u.star_columns(&self.goal);
        for s in &self.steps {
            set.insert(u.encode(&s.added));
        }
        Ok(set)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tableau serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

mod column_text {
    use super::Entry;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn to_text(col: &[Entry]) -> String {
        col.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
    }

    pub fn from_text(s: &str) -> Result<Vec<Entry>, String> {
        s.split_whitespace()
            .map(|t| match t {
                "*" | "∗" => Ok(Entry::Star),
                _ => match t.parse::<u8>() {
                    Ok(0) | Err(_) => Err(format!("bad entry `{t}`")),
                    Ok(v) => Ok(Entry::Var(v)),
                },
            })
            .collect()
    }

    pub fn serialize<S: Serializer>(col: &[Entry], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_text(col))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Entry>, D::Error> {
        let s = String::deserialize(d)?;
        from_text(&s).map_err(serde::de::Error::custom)
    }
}

mod column_list_text {
    use super::{column_text, Entry};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(cols: &[Vec<Entry>], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = cols.iter().map(|c| column_text::to_text(c)).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Entry>>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| column_text::from_text(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub use column_text::from_text as parse_column;
pub use column_text::to_text as column_to_text;

/// Outcome of [`decide`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: bool,
    /// Index of the trivial hypothesis that settled the question, if any.
    pub trivial_hypothesis: Option<usize>,
    /// One tableau per goal on success; the failing goal's partial tableau
    /// otherwise. Empty when a trivial hypothesis settled the question.
    pub tableaux: Vec<TableauProof>,
}

/// Decides `mclex∗ S ⊆ mclex∗ U`.
///
/// A trivial hypothesis settles the question positively. Otherwise each goal
/// `N ∈ U` is closed under `S` starting from `col∗(N)`; the implication fails
/// at the first goal whose right column is never reached.
pub fn decide(s: &[ExtendedMatrix], u: &[ExtendedMatrix]) -> Result<Decision, ClosureError> {
    if let Some(i) = s.iter().position(is_trivial) {
        return Ok(Decision {
            verdict: true,
            trivial_hypothesis: Some(i),
            tableaux: Vec::new(),
        });
    }
    let mut tableaux = Vec::with_capacity(u.len());
    for goal in u {
        let universe = ColumnUniverse::for_goal(goal)?;
        let engine = ClosureEngine::new(s, universe)?;
        let proof = prove_with(&engine, goal);
        if !proof.verdict {
            return Ok(Decision {
                verdict: false,
                trivial_hypothesis: None,
                tableaux: vec![proof],
            });
        }
        tableaux.push(proof);
    }
    Ok(Decision {
        verdict: true,
        trivial_hypothesis: None,
        tableaux,
    })
}

/// A goal matrix prepared for repeated implication checks.
#[derive(Clone, Debug)]
pub struct Goal {
    pub rows: usize,
    pub vars: usize,
    pub start: ColumnSet,
    pub target: ColumnCode,
}

impl Goal {
    pub fn new(n: &ExtendedMatrix) -> Result<Self, ClosureError> {
        let u = ColumnUniverse::for_goal(n)?;
        Ok(Goal {
            rows: u.arity(),
            vars: u.vars(),
            start: u.star_columns(n),
            target: u.encode(&n.right_column()),
        })
    }
}

/// A hypothesis set with one compiled engine per goal shape, built on demand.
pub struct Hypotheses {
    matrices: Vec<ExtendedMatrix>,
    trivial: bool,
    engines: HashMap<(usize, usize), ClosureEngine>,
}

impl Hypotheses {
    pub fn new(s: &[ExtendedMatrix]) -> Self {
        Hypotheses {
            matrices: s.to_vec(),
            trivial: s.iter().any(is_trivial),
            engines: HashMap::new(),
        }
    }

    /// Whether the hypotheses imply the goal matrix.
    pub fn implies(&mut self, g: &Goal) -> Result<bool, ClosureError> {
        if self.trivial || g.start.contains(g.target) {
            return Ok(true);
        }
        let key = (g.rows, g.vars);
        if !self.engines.contains_key(&key) {
            let e = ClosureEngine::new(&self.matrices, ColumnUniverse::new(g.rows, g.vars)?)?;
            self.engines.insert(key, e);
        }
        Ok(self.engines[&key].reaches(&g.start, g.target))
    }
}

/// Boolean-only [`decide`] without tableau bookkeeping.
pub fn implies(s: &[ExtendedMatrix], u: &[ExtendedMatrix]) -> Result<bool, ClosureError> {
    if s.iter().any(is_trivial) {
        return Ok(true);
    }
    for goal in u {
        let universe = ColumnUniverse::for_goal(goal)?;
        let start = universe.star_columns(goal);
        let target = universe.encode(&goal.right_column());
        let engine = ClosureEngine::new(s, universe)?;
        if !engine.reaches(&start, target) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds the tableau for one goal. A successful proof keeps only the steps
/// the target column depends on; a failed one logs the whole closure.
pub fn prove_with(engine: &ClosureEngine, goal: &ExtendedMatrix) -> TableauProof {
    let u = engine.universe();
    let start = u.star_columns(goal);
    let target = u.encode(&goal.right_column());
    let run = engine.run(&start, Some(target), true);
    let mut log = run.log;
    if run.reached_target {
        log = engine.lean_proof(&start, &log, target);
    }
    let mut steps = vec![TableauStep {
        added: u.decode(ColumnUniverse::STAR),
        witnesses: Vec::new(),
        consumed: Vec::new(),
    }];
    steps.extend(engine.tableau_steps(&log));
    TableauProof {
        goal: goal.clone(),
        hypotheses: engine.hypotheses().to_vec(),
        steps,
        verdict: run.reached_target,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {reason}")]
pub struct TableauError {
    pub step: usize,
    pub reason: String,
}

/// Independent replay of a tableau.
///
/// Step 0 must add the all-`∗` column. Every later step must be a row-wise
/// interpretation of rows of a single hypothesis whose left columns are all
/// present before the step and whose right column is the added column.
pub fn check_tableau(p: &TableauProof) -> Result<(), TableauError> {
    let err = |step: usize, reason: String| Err(TableauError { step, reason });
    let n = p.goal.rows();
    let k = p.goal.vars();
    let mut present: Vec<Vec<Entry>> = p.goal.left_columns().collect();
    let star = vec![Entry::Star; n];

    let Some(first) = p.steps.first() else {
        return err(0, "tableau has no steps".into());
    };
    if first.added != star || !first.witnesses.is_empty() {
        return err(0, "first step must add the all-∗ column".into());
    }
    present.push(star);

    let in_range = |e: &Entry| match e {
        Entry::Star => true,
        Entry::Var(v) => (*v as usize) <= k && *v > 0,
    };

    for (si, step) in p.steps.iter().enumerate().skip(1) {
        if step.witnesses.len() != n {
            return err(si, format!("expected {n} witnesses, found {}", step.witnesses.len()));
        }
        let mi = step.witnesses[0].matrix;
        if step.witnesses.iter().any(|w| w.matrix != mi) {
            return err(si, "witness rows come from different hypotheses".into());
        }
        let Some(m) = p.hypotheses.get(mi) else {
            return err(si, format!("no hypothesis #{mi}"));
        };
        let mut rows: Vec<Vec<Entry>> = Vec::with_capacity(n);
        for w in &step.witnesses {
            if w.row >= m.rows() {
                return err(si, format!("hypothesis #{mi} has no row {}", w.row));
            }
            if !w.map.iter().all(in_range) {
                return err(si, "map leaves the goal's alphabet".into());
            }
            let mut row = Vec::with_capacity(m.width());
            for &e in m.row(w.row) {
                row.push(match e {
                    Entry::Star => Entry::Star,
                    Entry::Var(v) => match w.map.get(v as usize - 1) {
                        Some(&img) => img,
                        None => return err(si, format!("map does not cover x{v}")),
                    },
                });
            }
            rows.push(row);
        }
        let col = |j: usize| -> Vec<Entry> { rows.iter().map(|r| r[j]).collect() };
        let lefts: Vec<Vec<Entry>> = (0..m.left_cols()).map(col).collect();
        if step.consumed != lefts {
            return err(si, "consumed columns do not match the interpretation".into());
        }
        if let Some(missing) = lefts.iter().find(|c| !present.contains(c)) {
            return err(
                si,
                format!("consumed column ({}) is not available", column_to_text(missing)),
            );
        }
        if col(m.left_cols()) != step.added {
            return err(si, "added column is not the interpretation's right column".into());
        }
        present.push(step.added.clone());
    }

    let goal_right = p.goal.right_column();
    let reached = present.contains(&goal_right);
    if p.verdict && !reached {
        return err(p.steps.len(), "the goal's right column is never reached".into());
    }
    if !p.verdict && reached {
        return err(p.steps.len(), "negative verdict but the goal's right column is present".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::parse_matrix;

    fn m(s: &str) -> ExtendedMatrix {
        parse_matrix(s).unwrap()
    }

    #[test]
    fn universe_round_trip() {
        let u = ColumnUniverse::new(3, 2).unwrap();
        assert_eq!(u.size(), 27);
        for c in 0..27 {
            assert_eq!(u.encode(&u.decode(c)), c);
        }
        assert_eq!(u.decode(ColumnUniverse::STAR), vec![Entry::Star; 3]);
        assert!(ColumnUniverse::new(40, 3).is_err());
    }

    #[test]
    fn instantiated_rows_of_subtraction() {
        let rows = build_instantiated_rows(&[m("1 * | 1 ; 1 1 | *")], 1);
        let tuples: Vec<String> = rows[0].iter().map(|r| column_to_text(&r.tuple)).collect();
        assert_eq!(tuples, vec!["* * *", "1 * 1", "1 1 *"]);
    }

    #[test]
    fn instantiated_rows_into_empty_alphabet() {
        let rows = build_instantiated_rows(&[m("1 2 2 | 1 ; 2 2 1 | 1")], 0);
        assert_eq!(rows[0].len(), 1);
        assert!(rows[0][0].tuple.iter().all(|e| e.is_star()));
    }

    #[test]
    fn empty_hypotheses_change_nothing() {
        let goal = m("1 * | 1 ; * 1 | 1");
        let u = ColumnUniverse::for_goal(&goal).unwrap();
        let start = u.star_columns(&goal);
        assert_eq!(closure(&[], &u, &start).unwrap(), start);
    }

    #[test]
    fn reflexive_closure_reaches_own_right_column() {
        let a = m("1 * * | 1 ; 2 2 1 | 1");
        assert!(implies(std::slice::from_ref(&a), std::slice::from_ref(&a)).unwrap());
    }

    #[test]
    fn basic_implications() {
        let maltsev = m("1 2 2 | 1 ; 2 2 1 | 1");
        let su = m("1 * * | 1 ; 2 2 1 | 1");
        let unital = m("1 * | 1 ; * 1 | 1");
        let sub = m("1 * | 1 ; 1 1 | *");
        assert!(implies(std::slice::from_ref(&maltsev), std::slice::from_ref(&su)).unwrap());
        assert!(!implies(std::slice::from_ref(&su), &[maltsev]).unwrap());
        assert!(implies(std::slice::from_ref(&su), &[unital.clone(), sub.clone()]).unwrap());
        assert!(implies(&[unital.clone(), sub.clone()], &[su]).unwrap());
        assert!(!implies(std::slice::from_ref(&unital), std::slice::from_ref(&sub)).unwrap());
        assert!(!implies(&[sub], &[unital]).unwrap());
    }

    #[test]
    fn decide_shortcuts_on_trivial_hypothesis() {
        let d = decide(&[m("| *"), m("* | 1")], &[m("1 2 2 | 1 ; 2 2 1 | 1")]).unwrap();
        assert!(d.verdict);
        assert_eq!(d.trivial_hypothesis, Some(1));
        assert!(d.tableaux.is_empty());
    }

    #[test]
    fn tableaux_replay() {
        let su = m("1 * * | 1 ; 2 1 2 | 1");
        let su3 = m("1 1 * | 1 ; * * 1 | 1 ; 1 * 1 | *");
        for (s, g) in [(&su, &su3), (&su3, &su)] {
            let d = decide(std::slice::from_ref(s), std::slice::from_ref(g)).unwrap();
            assert!(d.verdict);
            let p = &d.tableaux[0];
            check_tableau(p).unwrap();
            let back = TableauProof::from_json(&p.to_json()).unwrap();
            assert_eq!(&back, p);
        }
    }

    #[test]
    fn failed_tableau_replays_to_the_full_closure() {
        let unital = m("1 * | 1 ; * 1 | 1");
        let sub = m("1 * | 1 ; 1 1 | *");
        let d = decide(std::slice::from_ref(&unital), std::slice::from_ref(&sub)).unwrap();
        assert!(!d.verdict);
        let p = &d.tableaux[0];
        check_tableau(p).unwrap();
        assert_eq!(p.final_columns().unwrap(), sharp_closure_of(&[unital], &sub).unwrap());
    }

    #[test]
    fn tampered_tableau_is_rejected() {
        let su = m("1 * * | 1 ; 2 1 2 | 1");
        let su3 = m("1 1 * | 1 ; * * 1 | 1 ; 1 * 1 | *");
        let mut p = decide(&[su], &[su3]).unwrap().tableaux.remove(0);
        let idx = p.steps.len() - 1;
        p.steps[idx].consumed.pop();
        let e = check_tableau(&p).unwrap_err();
        assert_eq!(e.step, idx);
    }
}
