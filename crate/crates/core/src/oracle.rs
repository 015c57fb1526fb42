//! Brute-force semantics on small pointed sets.
//!
//! Everything here is exhaustive: relations are explicit tuple sets, maps are
//! enumerated one by one. Carriers are `{0, 1, …, s−1}` with `0` as the point.
//! Used as ground truth for the syntactic procedures.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use thiserror::Error;

use crate::closure::{decide, sharp_closure_of, ColumnUniverse};
use crate::degeneracy::{is_anti_trivial, is_trivial};
use crate::matrix::{Entry, ExtendedMatrix};

pub const MAX_CARRIER: usize = 4;
pub const MAX_ARITY: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("relation has arity {relation} but the matrix has {rows} rows")]
    Arity { relation: usize, rows: usize },
    #[error("carrier of size {0} is outside 1..={MAX_CARRIER}")]
    Carrier(usize),
    #[error("arity {0} is outside 1..={MAX_ARITY}")]
    ArityCap(usize),
    #[error("tuple {0:?} does not fit the relation")]
    Tuple(Vec<u8>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointedSet {
    size: usize,
}

impl PointedSet {
    pub fn new(size: usize) -> Result<Self, OracleError> {
        if size == 0 || size > MAX_CARRIER {
            return Err(OracleError::Carrier(size));
        }
        Ok(PointedSet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// All pointed maps `{∗, x1, …, x_vars} → self`, as value tables indexed
    /// by entry code.
    pub fn maps(&self, vars: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut f = vec![0u8; vars + 1];
        loop {
            out.push(f.clone());
            let mut i = 1;
            while i <= vars {
                if (f[i] as usize) + 1 < self.size {
                    f[i] += 1;
                    break;
                }
                f[i] = 0;
                i += 1;
            }
            if i > vars {
                return out;
            }
        }
    }
}

fn apply(f: &[u8], e: Entry) -> u8 {
    f[e.code() as usize]
}

/// A pointed relation `R ⊆ X^n`; always holds the all-point tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteRelation {
    carrier: PointedSet,
    arity: usize,
    tuples: BTreeSet<Vec<u8>>,
}

impl ConcreteRelation {
    pub fn new(carrier: PointedSet, arity: usize) -> Result<Self, OracleError> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(OracleError::ArityCap(arity));
        }
        let mut tuples = BTreeSet::new();
        tuples.insert(vec![0; arity]);
        Ok(ConcreteRelation {
            carrier,
            arity,
            tuples,
        })
    }

    pub fn with_tuples(
        carrier: PointedSet,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<u8>>,
    ) -> Result<Self, OracleError> {
        let mut r = Self::new(carrier, arity)?;
        for t in tuples {
            r.insert(t)?;
        }
        Ok(r)
    }

    /// The full cube `X^n`.
    pub fn full(carrier: PointedSet, arity: usize) -> Result<Self, OracleError> {
        let mut r = Self::new(carrier, arity)?;
        r.tuples = all_tuples(carrier.size, arity).into_iter().collect();
        Ok(r)
    }

    /// `col∗(N)`: the left columns of `N` plus the all-`∗` column, as a
    /// relation on the free pointed set `{∗, x1, …, x_k}`.
    pub fn columns_of(n: &ExtendedMatrix) -> Result<Self, OracleError> {
        let carrier = PointedSet::new(n.vars() + 1)?;
        let cols = n.left_columns().map(|c| c.iter().map(|e| e.code()).collect());
        Self::with_tuples(carrier, n.rows(), cols)
    }

    pub fn carrier(&self) -> PointedSet {
        self.carrier
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn contains(&self, t: &[u8]) -> bool {
        self.tuples.contains(t)
    }

    pub fn insert(&mut self, t: Vec<u8>) -> Result<bool, OracleError> {
        if t.len() != self.arity || t.iter().any(|&v| v as usize >= self.carrier.size) {
            return Err(OracleError::Tuple(t));
        }
        Ok(self.tuples.insert(t))
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Vec<u8>> {
        self.tuples.iter()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn all_tuples(size: usize, arity: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..size as u8).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Row-wise interpretation: one pointed map per row and the grid it yields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowInterpretation {
    pub maps: Vec<Vec<u8>>,
    /// Concrete columns; the last one is the image of the right column.
    pub columns: Vec<Vec<u8>>,
}

impl RowInterpretation {
    fn build(m: &ExtendedMatrix, maps: Vec<Vec<u8>>) -> Self {
        let columns = (0..m.width())
            .map(|j| (0..m.rows()).map(|i| apply(&maps[i], m.row(i)[j])).collect())
            .collect();
        RowInterpretation { maps, columns }
    }

    pub fn left(&self) -> &[Vec<u8>] {
        &self.columns[..self.columns.len() - 1]
    }

    pub fn right(&self) -> &[u8] {
        &self.columns[self.columns.len() - 1]
    }
}

/// Calls `visit` on every row-wise interpretation of `m` into `x`, stopping
/// at the first one for which it returns `false`.
fn each_interpretation(
    m: &ExtendedMatrix,
    x: PointedSet,
    uniform: bool,
    mut visit: impl FnMut(RowInterpretation) -> bool,
) {
    let maps = x.maps(m.max_var());
    let n = m.rows();
    if uniform {
        for f in &maps {
            if !visit(RowInterpretation::build(m, vec![f.clone(); n])) {
                return;
            }
        }
        return;
    }
    let mut idx = vec![0usize; n];
    loop {
        let chosen = idx.iter().map(|&i| maps[i].clone()).collect();
        if !visit(RowInterpretation::build(m, chosen)) {
            return;
        }
        let mut i = 0;
        while i < n {
            idx[i] += 1;
            if idx[i] < maps.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == n {
            return;
        }
    }
}

fn counterexample(r: &ConcreteRelation, m: &ExtendedMatrix, uniform: bool) -> Result<Option<RowInterpretation>, OracleError> {
    if r.arity != m.rows() {
        return Err(OracleError::Arity {
            relation: r.arity,
            rows: m.rows(),
        });
    }
    let mut found = None;
    each_interpretation(m, r.carrier, uniform, |it| {
        if it.left().iter().all(|c| r.contains(c)) && !r.contains(it.right()) {
            found = Some(it);
            return false;
        }
        true
    });
    Ok(found)
}

/// A row-wise interpretation with all left columns in `R` but not its right
/// column, if one exists.
pub fn strict_counterexample(r: &ConcreteRelation, m: &ExtendedMatrix) -> Result<Option<RowInterpretation>, OracleError> {
    counterexample(r, m, false)
}

pub fn strictly_closed(r: &ConcreteRelation, m: &ExtendedMatrix) -> Result<bool, OracleError> {
    Ok(counterexample(r, m, false)?.is_none())
}

/// Non-strict closedness: the same map interprets every row.
pub fn closed(r: &ConcreteRelation, m: &ExtendedMatrix) -> Result<bool, OracleError> {
    Ok(counterexample(r, m, true)?.is_none())
}

/// All matrices whose rows are `rows[sel[0]], rows[sel[1]], …` for every
/// `sel: {0..arity} → rows`.
fn row_selections(m: &ExtendedMatrix, arity: usize) -> Vec<ExtendedMatrix> {
    let n = m.rows();
    let mut out = Vec::new();
    let mut sel = vec![0usize; arity];
    loop {
        let rows: Vec<Vec<Entry>> = sel.iter().map(|&i| m.row(i).to_vec()).collect();
        out.push(ExtendedMatrix::from_rows(&rows, m.vars()).expect("rows of one matrix"));
        let mut i = 0;
        while i < arity {
            sel[i] += 1;
            if sel[i] < n {
                break;
            }
            sel[i] = 0;
            i += 1;
        }
        if i == arity {
            return out;
        }
    }
}

/// Strictly closed under every row selection of `m` of the relation's arity.
pub fn sharp(r: &ConcreteRelation, m: &ExtendedMatrix) -> bool {
    row_selections(m, r.arity)
        .iter()
        .all(|sel| counterexample(r, sel, false).expect("arity matches by construction").is_none())
}

/// Left agreement of two rows under pointed maps into `y` forces agreement
/// of their right entries.
pub fn is_functional(m: &ExtendedMatrix, y: PointedSet) -> bool {
    let maps = y.maps(m.max_var());
    for i in 0..m.rows() {
        for i2 in 0..m.rows() {
            let (a, b) = (m.row(i), m.row(i2));
            for f in &maps {
                for g in &maps {
                    let left_agree = (0..m.left_cols()).all(|j| apply(f, a[j]) == apply(g, b[j]));
                    if left_agree && apply(f, a[m.left_cols()]) != apply(g, b[m.left_cols()]) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Pointed sets have `M`-closed relations. Decided on the one relation that
/// can fail: the left columns of `M` and the `∗` column, on `{∗, x1, …, xk}`.
pub fn set_star_has_closed_relations(m: &ExtendedMatrix) -> bool {
    let r = ConcreteRelation::columns_of(&m.tight()).expect("small matrix");
    closed(&r, m).expect("arity matches")
}

/// The least relation above `R` that is `M`-sharp for every `M` in `s`,
/// by naive iteration over concrete tuples.
pub fn reflect(r: &ConcreteRelation, s: &[ExtendedMatrix]) -> ConcreteRelation {
    let mut out = r.clone();
    let selections: Vec<ExtendedMatrix> = s.iter().flat_map(|m| row_selections(m, r.arity)).collect();
    loop {
        let mut added = Vec::new();
        for m in &selections {
            each_interpretation(m, out.carrier, false, |it| {
                if it.left().iter().all(|c| out.contains(c)) && !out.contains(it.right()) {
                    added.push(it.right().to_vec());
                }
                true
            });
        }
        if added.is_empty() {
            return out;
        }
        for t in added {
            out.tuples.insert(t);
        }
    }
}

/// Grids of the four forbidden reductions, as (left column set, right column)
/// over `{∗ = 0, a = 1}`.
fn forbidden() -> Vec<(BTreeSet<Vec<u8>>, Vec<u8>)> {
    vec![
        (BTreeSet::new(), vec![1]),
        (BTreeSet::from([vec![0]]), vec![1]),
        (BTreeSet::from([vec![1, 1]]), vec![1, 0]),
        (BTreeSet::from([vec![1, 1], vec![0, 0]]), vec![1, 0]),
    ]
}

/// Whether some reduction of `M` of type `({∗,a})` or `({∗,a},{∗,a})` is one
/// of the four matrices `[ | x1]`, `[∗ | x1]`, `[x1 | x1 ; x1 | ∗]`,
/// `[x1 ∗ | x1 ; x1 ∗ | ∗]`. Left columns are compared as sets.
pub fn has_forbidden_reduction(m: &ExtendedMatrix) -> bool {
    let two = PointedSet::new(2).expect("two elements");
    let targets = forbidden();
    for arity in 1..=2 {
        for sel in row_selections(m, arity) {
            let mut hit = false;
            each_interpretation(&sel, two, false, |it| {
                let left: BTreeSet<Vec<u8>> = it.left().iter().cloned().collect();
                hit = targets.iter().any(|(l, r)| *l == left && r.as_slice() == it.right());
                !hit
            });
            if hit {
                return true;
            }
        }
    }
    false
}

/// The closure engine's `col∗_S(N)` as a concrete relation.
pub fn engine_reflection(s: &[ExtendedMatrix], n: &ExtendedMatrix) -> ConcreteRelation {
    let n = n.tight();
    let u = ColumnUniverse::new(n.rows(), n.vars()).expect("small universe");
    let set = sharp_closure_of(s, &n).expect("small universe");
    let carrier = PointedSet::new(n.vars() + 1).expect("small carrier");
    let tuples = set.iter().map(|c| u.decode(c).iter().map(|e| e.code()).collect());
    ConcreteRelation::with_tuples(carrier, n.rows(), tuples).expect("tuples fit")
}

/// Every distinct normal form of a matrix with at most `rows` rows, `cols`
/// left columns and `vars` variables.
pub fn normalized_corpus(rows: usize, cols: usize, vars: usize) -> Vec<ExtendedMatrix> {
    let mut seen = BTreeSet::new();
    for m in 0..=cols {
        let mut row_pool: Vec<Vec<Entry>> = Vec::new();
        for codes in all_tuples(vars + 1, m + 1) {
            // Right entry first, then left to right: variables in order of
            // first occurrence.
            let mut next = 1u8;
            let order = std::iter::once(m).chain(0..m);
            let ok = order.into_iter().all(|j| {
                let c = codes[j];
                if c == next {
                    next += 1;
                }
                c < next
            });
            if ok {
                row_pool.push(codes.iter().map(|&c| Entry::from_code(c)).collect());
            }
        }
        for n in 1..=rows {
            for combo in combinations(row_pool.len(), n) {
                let grid: Vec<Vec<Entry>> = combo.iter().map(|&i| row_pool[i].clone()).collect();
                let mat = ExtendedMatrix::from_rows(&grid, vars).expect("valid rows");
                seen.insert(mat.normalize().tight());
            }
        }
    }
    seen.into_iter().collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A uniformly random matrix with `1..=rows` rows, `0..=cols` left columns
/// and entries in `{∗, x1, …, x_vars}`.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, vars: usize) -> ExtendedMatrix {
    let n = rng.gen_range(1..=rows);
    let m = rng.gen_range(0..=cols);
    let grid: Vec<Vec<Entry>> = (0..n)
        .map(|_| (0..=m).map(|_| Entry::from_code(rng.gen_range(0..=vars as u8))).collect())
        .collect();
    ExtendedMatrix::from_rows(&grid, vars).expect("valid shape")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

/// Outcome of one battery check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    /// First few disagreements, as matrix texts.
    pub failures: Vec<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check<T: Sync>(name: &str, corpus: &[T], show: impl Fn(&T) -> String + Sync, ok: impl Fn(&T) -> bool + Sync) -> Check {
    let mut failures: Vec<String> = corpus.par_iter().filter(|c| !ok(c)).map(&show).collect();
    failures.truncate(10);
    Check {
        name: name.to_string(),
        cases: corpus.len(),
        failures,
    }
}

/// The example relation `{(∗,∗), (a,∗), (a,a)}` on `{∗, a}`.
pub fn example_relation() -> ConcreteRelation {
    let a = PointedSet::new(2).expect("two elements");
    ConcreteRelation::with_tuples(a, 2, [vec![1, 0], vec![1, 1]]).expect("valid tuples")
}

fn example_verdicts() -> Check {
    let r = example_relation();
    let m: ExtendedMatrix = "1 * * | 1 ; 2 2 1 | 1".parse().expect("literal");
    let m21: ExtendedMatrix = "2 2 1 | 1 ; 1 * * | 1".parse().expect("literal");
    let verdicts = [
        ("strictly M-closed", strictly_closed(&r, &m) == Ok(true)),
        ("M21-closed", closed(&r, &m21) == Ok(true)),
        ("not strictly M21-closed", strictly_closed(&r, &m21) == Ok(false)),
        ("not M-sharp", !sharp(&r, &m)),
    ];
    Check {
        name: "example relation verdicts".into(),
        cases: verdicts.len(),
        failures: verdicts.iter().filter(|v| !v.1).map(|v| v.0.to_string()).collect(),
    }
}

fn pairs(corpus: &[ExtendedMatrix]) -> Vec<(ExtendedMatrix, ExtendedMatrix)> {
    corpus
        .iter()
        .flat_map(|a| corpus.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

/// Runs the agreement checks between the syntactic procedures and brute
/// force. `Fast` covers the exhaustive small corpora; `Full` adds random
/// matrices, larger carriers and the soundness of implications.
pub fn run_battery(level: Level) -> Vec<Check> {
    let two = PointedSet::new(2).expect("two elements");
    let corpus = normalized_corpus(3, 3, 2);
    let text = |m: &ExtendedMatrix| m.to_text();
    let mut out = vec![
        check("trivial iff not functional in a 2-element set", &corpus, text, |m| {
            is_trivial(m) == !is_functional(m, two)
        }),
        check("trivial iff a forbidden reduction exists", &corpus, text, |m| {
            is_trivial(m) == has_forbidden_reduction(m)
        }),
        check("anti-trivial iff pointed sets have closed relations", &corpus, text, |m| {
            is_anti_trivial(m) == set_star_has_closed_relations(m)
        }),
    ];
    let small = normalized_corpus(2, 2, 1);
    let pair_text = |p: &(ExtendedMatrix, ExtendedMatrix)| format!("S = {{{}}}, N = {}", p.0, p.1);
    out.push(check("reflection equals the closure engine", &pairs(&small), pair_text, |(m, n)| {
        reflect(&ConcreteRelation::columns_of(&n.tight()).expect("small"), std::slice::from_ref(m))
            == engine_reflection(std::slice::from_ref(m), n)
    }));
    out.push(example_verdicts());
    if level == Level::Fast {
        return out;
    }

    let mut rng = StdRng::seed_from_u64(0x6d636c6578);
    let random: Vec<ExtendedMatrix> = (0..1000).map(|_| random_matrix(&mut rng, 4, 4, 3)).collect();
    let sets: Vec<PointedSet> = (2..=4).map(|s| PointedSet::new(s).expect("capped")).collect();
    for (name, c) in [("exhaustive", &corpus), ("random", &random)] {
        out.push(check(&format!("conditions of the triviality theorem agree ({name})"), c, text, |m| {
            let t = is_trivial(m);
            t == has_forbidden_reduction(m) && sets.iter().all(|&y| t == !is_functional(m, y))
        }));
        out.push(check(&format!("anti-triviality conditions agree ({name})"), c, text, |m| {
            is_anti_trivial(m) == set_star_has_closed_relations(m)
        }));
    }
    out.push(check("normal forms keep degeneracy", &random, text, |m| {
        let n = m.normalize();
        is_trivial(m) == is_trivial(&n) && is_anti_trivial(m) == is_anti_trivial(&n)
    }));
    // A trivial hypothesis implies everything without a closure argument, so
    // its sharp relations need not be closed under anything.
    out.push(check("implications are sound on small relations", &pairs(&small), pair_text, |(m, n)| {
        let yes = !is_trivial(m)
            && decide(std::slice::from_ref(m), std::slice::from_ref(n))
            .map(|d| d.verdict)
            .unwrap_or(false);
        !yes || small_relations(n.rows()).iter().all(|r| !sharp(r, m) || closed(r, n).expect("arity"))
    }));
    out.push(check("sharp relations are strictly closed", &pairs(&small), pair_text, |(m, _)| {
        small_relations(m.rows())
            .iter()
            .all(|r| !sharp(r, m) || strictly_closed(r, m).expect("arity"))
    }));
    out
}

/// Every pointed relation of the given arity on carriers of size 2 and 3,
/// skipping those with more than 2^12 candidates.
fn small_relations(arity: usize) -> Vec<ConcreteRelation> {
    let mut out = Vec::new();
    for s in 2..=3 {
        let carrier = PointedSet::new(s).expect("capped");
        let others: Vec<Vec<u8>> = all_tuples(s, arity).into_iter().filter(|t| t.iter().any(|&v| v != 0)).collect();
        if others.len() > 12 {
            continue;
        }
        for mask in 0u32..(1 << others.len()) {
            let tuples = others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone());
            out.push(ConcreteRelation::with_tuples(carrier, arity, tuples).expect("fits"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> ExtendedMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn map_enumeration() {
        let two = PointedSet::new(2).unwrap();
        assert_eq!(two.maps(2), vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![0, 1, 1]]);
        assert_eq!(PointedSet::new(1).unwrap().maps(3).len(), 1);
        assert_eq!(PointedSet::new(5), Err(OracleError::Carrier(5)));
    }

    #[test]
    fn example_relation_witness() {
        let r = example_relation();
        let m21 = m("2 2 1 | 1 ; 1 * * | 1");
        let it = strict_counterexample(&r, &m21).unwrap().unwrap();
        assert_eq!(it.left(), &[vec![1, 1], vec![1, 0], vec![0, 0]]);
        assert_eq!(it.right(), &[0, 1]);
        assert!(example_verdicts().passed());
        assert_eq!(
            strictly_closed(&r, &m("1 | 1")),
            Err(OracleError::Arity { relation: 2, rows: 1 })
        );
    }

    #[test]
    fn trivial_cases() {
        let one = PointedSet::new(1).unwrap();
        let two = PointedSet::new(2).unwrap();
        assert!(is_functional(&m("| 1"), one));
        assert!(!is_functional(&m("| 1"), two));
        assert!(is_functional(&m("1 * | 1 ; * 1 | 1"), two));
        assert!(has_forbidden_reduction(&m("* | 1")));
        assert!(!has_forbidden_reduction(&m("1 * | 1 ; * 1 | 1")));
        assert!(set_star_has_closed_relations(&m("| *")));
        assert!(set_star_has_closed_relations(&m("1 | 1")));
        assert!(!set_star_has_closed_relations(&m("1 2 2 | 1 ; 2 2 1 | 1")));
        let full = ConcreteRelation::full(PointedSet::new(3).unwrap(), 2).unwrap();
        assert!(sharp(&full, &m("1 2 2 | 1 ; 2 2 1 | 1")));
        assert!(closed(&full, &m("| 1 ; | 1")).unwrap());
    }

    #[test]
    fn reflection_reaches_the_target() {
        let su = m("1 * * | 1 ; 2 2 1 | 1");
        let n = m("1 1 * | 1 ; * * 1 | 1 ; 1 * 1 | *");
        let r = reflect(&ConcreteRelation::columns_of(&n).unwrap(), &[su]);
        assert!(r.contains(&[1, 1, 0]));
        let base = ConcreteRelation::columns_of(&n).unwrap();
        assert_eq!(reflect(&base, &[]), base);
    }

    #[test]
    fn corpus_is_normalized() {
        let c = normalized_corpus(2, 1, 1);
        assert!(c.iter().all(|m| m.is_normalized()));
        assert!(c.iter().any(|x| x.to_text() == "| 1"));
    }
}
