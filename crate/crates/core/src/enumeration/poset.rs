//! The class poset of a window, its Hasse diagram, and JSON/DOT output.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::generate::Window;
use crate::matrix::ExtendedMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNode {
    pub canonical: ExtendedMatrix,
    /// Number of generated candidates that fell into this class.
    pub members: usize,
    /// Fewest left columns among those candidates. Not serialized.
    #[serde(skip)]
    pub min_cols: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Group {
    pub label: String,
    pub class_ids: Vec<usize>,
}

/// Classes ordered by inclusion of their matrix classes.
///
/// `edges` lists every strict inclusion `(a, b)`, meaning
/// `mclex∗{a} ⊆ mclex∗{b}`; `reduced_edges` is its transitive reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PosetGraph {
    pub params: Window,
    pub classes: Vec<ClassNode>,
    pub edges: Vec<(usize, usize)>,
    pub reduced_edges: Vec<(usize, usize)>,
    pub groups: Vec<Group>,
}

struct Bits {
    words: usize,
    data: Vec<u64>,
}

impl Bits {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Bits {
            words,
            data: vec![0; n * words],
        }
    }

    fn set(&mut self, row: usize, col: usize) {
        self.data[row * self.words + col / 64] |= 1 << (col % 64);
    }

    fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.words + col / 64] >> (col % 64) & 1 == 1
    }

    fn row(&self, row: usize) -> &[u64] {
        &self.data[row * self.words..(row + 1) * self.words]
    }
}

/// Hasse edges of a transitive relation given by all of its strict pairs.
pub fn transitive_reduction(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut succ = Bits::new(n);
    let mut pred = Bits::new(n);
    for &(a, b) in edges {
        succ.set(a, b);
        pred.set(b, a);
    }
    edges
        .iter()
        .copied()
        .filter(|&(a, b)| {
            !succ
                .row(a)
                .iter()
                .zip(pred.row(b))
                .any(|(x, y)| x & y != 0)
        })
        .collect()
}

/// Strict pairs of the reflexive-transitive closure of `edges`.
pub fn transitive_closure(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut reach = Bits::new(n);
    for &(a, b) in edges {
        reach.set(a, b);
    }
    // Warshall on bit rows.
    for k in 0..n {
        let row_k: Vec<u64> = reach.row(k).to_vec();
        for i in 0..n {
            if reach.get(i, k) {
                let w = reach.words;
                for (dst, src) in reach.data[i * w..(i + 1) * w].iter_mut().zip(&row_k) {
                    *dst |= src;
                }
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && reach.get(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

impl PosetGraph {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Number of classes that already occur with at most `cols` left
    /// columns, i.e. the size of the window with `cols` in place of `m`.
    /// Only meaningful on a freshly classified graph.
    pub fn count_within_cols(&self, cols: usize) -> usize {
        self.classes.iter().filter(|c| c.min_cols <= cols).count()
    }

    pub fn find(&self, m: &ExtendedMatrix) -> Option<usize> {
        self.classes.iter().position(|c| &c.canonical == m)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        a == b || self.edges.binary_search(&(a, b)).is_ok()
    }

    /// Induced subposet on the classes flagged in `keep`, renumbered in order.
    pub fn restrict(&self, keep: &[bool]) -> PosetGraph {
        let mut new_id = vec![usize::MAX; self.classes.len()];
        let mut classes = Vec::new();
        for (i, c) in self.classes.iter().enumerate() {
            if keep[i] {
                new_id[i] = classes.len();
                classes.push(c.clone());
            }
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(a, b)| keep[a] && keep[b])
            .map(|&(a, b)| (new_id[a], new_id[b]))
            .collect();
        let reduced_edges = transitive_reduction(classes.len(), &edges);
        let groups = self
            .groups
            .iter()
            .filter_map(|g| {
                let ids: Vec<usize> = g.class_ids.iter().filter(|&&i| keep[i]).map(|&i| new_id[i]).collect();
                (!ids.is_empty()).then(|| Group {
                    label: g.label.clone(),
                    class_ids: ids,
                })
            })
            .collect();
        PosetGraph {
            params: self.params,
            classes,
            edges,
            reduced_edges,
            groups,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("poset serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Graphviz rendering: one box per class, localization groups as
    /// clusters, reduced edges only.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let _ = writeln!(out, "digraph mclex {{");
        let _ = writeln!(out, "  label=\"Mclex*[{},{},{}]\";", p.rows, p.cols, p.vars);
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=box, fontname=\"monospace\"];");
        let node = |out: &mut String, i: usize, indent: &str| {
            let label = self.classes[i].canonical.to_grid_text().replace('\n', "\\l");
            let _ = writeln!(out, "{indent}c{i} [label=\"{label}\\l\"];");
        };
        let mut grouped = vec![false; self.classes.len()];
        for (gi, g) in self.groups.iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{gi} {{");
            let _ = writeln!(out, "    label=\"{}\";", g.label.replace('"', "\\\""));
            let _ = writeln!(out, "    style=rounded; color=blue;");
            for &i in &g.class_ids {
                grouped[i] = true;
                node(&mut out, i, "    ");
            }
            let _ = writeln!(out, "  }}");
        }
        for (i, done) in grouped.iter().enumerate() {
            if !done {
                node(&mut out, i, "  ");
            }
        }
        for &(a, b) in &self.reduced_edges {
            let _ = writeln!(out, "  c{a} -> c{b};");
        }
        let _ = writeln!(out, "}}");
        out
    }
}
