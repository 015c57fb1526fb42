//! Detection of the two degenerate matrix classes.
//!
//! A matrix is *trivial* when only categories equivalent to the one-morphism
//! category have closed relations for it, and *anti-trivial* when every
//! finitely complete pointed category does. Both are decided syntactically.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::matrix::{Entry, ExtendedMatrix};
use crate::partition::DisjointSets;

/// An equivalence relation on the left column indices `0..m`, stored as the
/// smallest member of each index's block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnPartition {
    labels: Vec<usize>,
}

impl ColumnPartition {
    pub fn same(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Blocks in order of their smallest element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (j, &l) in self.labels.iter().enumerate() {
            if l == j {
                out.push(vec![j]);
            } else {
                let b = out.iter_mut().find(|b| b[0] == l).expect("label is a block head");
                b.push(j);
            }
        }
        out
    }

    fn from_sets(mut sets: DisjointSets) -> Self {
        ColumnPartition {
            labels: sets.labels(),
        }
    }
}

/// Kernel of the left part of row `i`: `j ~ j'` iff the two entries agree.
pub fn row_kernel(m: &ExtendedMatrix, i: usize) -> ColumnPartition {
    let mut sets = DisjointSets::new(m.left_cols());
    seed_row_kernel(&mut sets, m, i);
    ColumnPartition::from_sets(sets)
}

/// `j ~ j'` iff `j = j'` or both columns carry a `∗` in row `i` or row `i2`.
pub fn star_pair_relation(m: &ExtendedMatrix, i: usize, i2: usize) -> ColumnPartition {
    let mut sets = DisjointSets::new(m.left_cols());
    seed_star_pairs(&mut sets, m, i, i2);
    ColumnPartition::from_sets(sets)
}

/// The join of the two row kernels and the star-pair relation.
pub fn join_partition(m: &ExtendedMatrix, i: usize, i2: usize) -> ColumnPartition {
    let mut sets = DisjointSets::new(m.left_cols());
    seed_row_kernel(&mut sets, m, i);
    seed_row_kernel(&mut sets, m, i2);
    seed_star_pairs(&mut sets, m, i, i2);
    ColumnPartition::from_sets(sets)
}

fn seed_row_kernel(sets: &mut DisjointSets, m: &ExtendedMatrix, i: usize) {
    let row = m.left_row(i);
    for j in 0..row.len() {
        if let Some(first) = (0..j).find(|&p| row[p] == row[j]) {
            sets.union(first, j);
        }
    }
}

fn seed_star_pairs(sets: &mut DisjointSets, m: &ExtendedMatrix, i: usize, i2: usize) {
    let mut head: Option<usize> = None;
    for j in 0..m.left_cols() {
        if m.entry(i, j).is_star() || m.entry(i2, j).is_star() {
            match head {
                None => head = Some(j),
                Some(h) => {
                    sets.union(h, j);
                }
            }
        }
    }
}

/// True when the matrix is trivial, i.e. it violates at least one of the
/// three combinatorial conditions characterising non-trivial matrices.
pub fn is_trivial(m: &ExtendedMatrix) -> bool {
    !right_entries_occur_on_left(m) || !matched_rows_are_joined(m) || !star_rows_are_reachable(m)
}

/// Every row with a variable right entry repeats it among its left entries.
fn right_entries_occur_on_left(m: &ExtendedMatrix) -> bool {
    (0..m.rows()).all(|i| {
        let r = m.right(i);
        r.is_star() || m.left_row(i).contains(&r)
    })
}

/// Positions `j` in row `i` where the left entry equals a variable right entry.
fn right_positions(m: &ExtendedMatrix, i: usize) -> Vec<usize> {
    let r = m.right(i);
    if r.is_star() {
        return Vec::new();
    }
    (0..m.left_cols()).filter(|&j| m.entry(i, j) == r).collect()
}

fn matched_rows_are_joined(m: &ExtendedMatrix) -> bool {
    let n = m.rows();
    for i in 0..n {
        let pi = right_positions(m, i);
        if pi.is_empty() {
            continue;
        }
        for i2 in 0..n {
            if i2 == i {
                continue;
            }
            let pi2 = right_positions(m, i2);
            if pi2.is_empty() {
                continue;
            }
            let join = join_partition(m, i, i2);
            if !pi.iter().all(|&j| pi2.iter().all(|&j2| join.same(j, j2))) {
                return false;
            }
        }
    }
    true
}

fn star_rows_are_reachable(m: &ExtendedMatrix) -> bool {
    let n = m.rows();
    for i in 0..n {
        let pi = right_positions(m, i);
        if pi.is_empty() {
            continue;
        }
        for i2 in 0..n {
            if !m.right(i2).is_star() {
                continue;
            }
            let join = join_partition(m, i, i2);
            for &j in &pi {
                let reachable = (0..m.left_cols()).any(|j2| {
                    join.same(j, j2) && (m.entry(i, j2).is_star() || m.entry(i2, j2).is_star())
                });
                if !reachable {
                    return false;
                }
            }
        }
    }
    true
}

/// True when the right column is all `∗` or equals one of the left columns.
pub fn is_anti_trivial(m: &ExtendedMatrix) -> bool {
    let right = m.right_column();
    right.iter().all(|e| *e == Entry::Star) || m.left_columns().any(|c| c == right)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    Trivial,
    AntiTrivial,
    Proper,
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Degeneracy::Trivial => "trivial",
            Degeneracy::AntiTrivial => "anti-trivial",
            Degeneracy::Proper => "proper",
        })
    }
}

pub fn degeneracy_class(m: &ExtendedMatrix) -> Degeneracy {
    if is_trivial(m) {
        Degeneracy::Trivial
    } else if is_anti_trivial(m) {
        Degeneracy::AntiTrivial
    } else {
        Degeneracy::Proper
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::parse_matrix;

    fn m(s: &str) -> ExtendedMatrix {
        parse_matrix(s).unwrap()
    }

    #[test]
    fn trivial_examples() {
        assert!(is_trivial(&m("| 1")));
        assert!(is_trivial(&m("* | 1")));
        assert!(is_trivial(&m("1 | 1 ; 1 | *")));
        assert!(is_trivial(&m("1 * | 1 ; 1 * | *")));
        assert!(!is_trivial(&m("1 * | 1 ; * 1 | 1")));
        assert!(!is_trivial(&m("1 2 2 | 1 ; 2 2 1 | 1")));
        assert!(!is_trivial(&m("| *")));
        // Non-pointed matrix with distinct left variables in a row.
        assert!(is_trivial(&m("2 | 1")));
    }

    #[test]
    fn anti_trivial_examples() {
        assert!(is_anti_trivial(&m("| *")));
        assert!(!is_anti_trivial(&m("1 2 2 | 1 ; 2 2 1 | 1")));
        assert!(is_anti_trivial(&m("1 | 1")));
        assert!(is_anti_trivial(&m("1 * | * ; 2 1 | *")));
    }

    #[test]
    fn classes() {
        assert_eq!(degeneracy_class(&m("| 1")), Degeneracy::Trivial);
        assert_eq!(degeneracy_class(&m("| *")), Degeneracy::AntiTrivial);
        assert_eq!(degeneracy_class(&m("1 * | 1 ; 1 1 | *")), Degeneracy::Proper);
        assert_eq!(degeneracy_class(&m("1 * * | 1 ; 2 2 1 | 1")), Degeneracy::Proper);
    }

    #[test]
    fn partitions() {
        let a = m("1 1 * 2 | 1 ; * 2 2 1 | 1");
        assert_eq!(row_kernel(&a, 0).blocks(), vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(star_pair_relation(&a, 0, 1).blocks(), vec![vec![0, 2], vec![1], vec![3]]);
        // kernel(row 1) joins 1 and 2.
        assert_eq!(join_partition(&a, 0, 1).blocks(), vec![vec![0, 1, 2], vec![3]]);
    }
}
