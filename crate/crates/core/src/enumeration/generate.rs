//! Candidate generation for a window `(n, m, k)`.
//!
//! Every matrix class representable in the window has a member of the
//! following shape, so only those are emitted:
//!
//! * the right column is `a` copies of `x1` followed by `b` copies of `∗`;
//! * left columns are distinct, not all-`∗`, and in increasing order;
//! * rows are distinct and increasing inside each of the two blocks;
//! * inside a row, new variables appear in increasing order (after `x1` in
//!   the first block, from `x1` in the second).
//!
//! Matrices whose right column is all `∗` or repeats a left column all lie
//! in the top class; of these only `| *` is emitted.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::EnumerationError;
use crate::matrix::{Entry, ExtendedMatrix};

/// Dimension bounds: at most `rows` rows, `cols` left columns, `vars` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    #[serde(rename = "n")]
    pub rows: usize,
    #[serde(rename = "m")]
    pub cols: usize,
    #[serde(rename = "k")]
    pub vars: usize,
}

impl Window {
    pub fn new(rows: usize, cols: usize, vars: usize) -> Result<Self, EnumerationError> {
        if rows == 0 {
            return Err(EnumerationError::Parameters("at least one row is required".into()));
        }
        if rows > 8 || vars > 8 {
            return Err(EnumerationError::Parameters(format!(
                "window ({rows},{cols},{vars}) is too large to enumerate"
            )));
        }
        Ok(Window { rows, cols, vars })
    }

    /// Shrinks the window to bounds that carry the same classes:
    /// at most `(k+1)^n − 2` left columns when `k > 0`, and at most `m − 1`
    /// variables when `m > 1`.
    pub fn capped(self) -> Window {
        let mut w = self;
        if w.vars > 0 {
            let cap = (w.vars + 1).saturating_pow(w.rows as u32).saturating_sub(2);
            w.cols = w.cols.min(cap);
        }
        if w.cols > 1 {
            w.vars = w.vars.min(w.cols - 1);
        }
        w
    }

    pub fn contains(&self, m: &ExtendedMatrix) -> bool {
        m.rows() <= self.rows && m.left_cols() <= self.cols && m.max_var() <= self.vars
    }

    /// Upper bound on the number of rows needed to represent every class
    /// with `cols` left columns, `2m^m − (m−1)^m − 1`. Known to be loose.
    pub fn row_bound(cols: usize) -> Option<usize> {
        if cols == 0 {
            return Some(1);
        }
        let m = cols as u32;
        let a = (cols as u128).checked_pow(m)?.checked_mul(2)?;
        let b = ((cols - 1) as u128).checked_pow(m)?;
        usize::try_from(a - b - 1).ok()
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.rows, self.cols, self.vars)
    }
}

/// The pruned candidates of a window, in `(rows, cols, vars, LexKey)` order.
#[derive(Clone, Debug)]
pub struct CandidateStream {
    pub window: Window,
    pub requested: Window,
    candidates: Vec<ExtendedMatrix>,
}

impl CandidateStream {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn as_slice(&self) -> &[ExtendedMatrix] {
        &self.candidates
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ExtendedMatrix> {
        self.candidates.iter()
    }
}

impl IntoIterator for CandidateStream {
    type Item = ExtendedMatrix;
    type IntoIter = std::vec::IntoIter<ExtendedMatrix>;

    fn into_iter(self) -> Self::IntoIter {
        self.candidates.into_iter()
    }
}

impl<'a> IntoIterator for &'a CandidateStream {
    type Item = &'a ExtendedMatrix;
    type IntoIter = std::slice::Iter<'a, ExtendedMatrix>;

    fn into_iter(self) -> Self::IntoIter {
        self.candidates.iter()
    }
}

pub fn generate(rows: usize, cols: usize, vars: usize) -> Result<CandidateStream, EnumerationError> {
    let requested = Window::new(rows, cols, vars)?;
    let window = requested.capped();
    let mut out = vec![ExtendedMatrix::from_codes(&[&[0]])];
    if window.vars > 0 {
        for n in 1..=window.rows {
            for a in 1..=n {
                Builder::new(n, a, window.cols, window.vars).run(&mut out);
            }
        }
    }
    out.sort_by_cached_key(|m| m.canonical_order_key());
    Ok(CandidateStream {
        window,
        requested,
        candidates: out,
    })
}

struct Builder {
    n: usize,
    a: usize,
    max_cols: usize,
    columns: Vec<Vec<Entry>>,
    right: Vec<Entry>,
}

struct State {
    chosen: Vec<usize>,
    /// Next variable index each row may introduce.
    next_new: Vec<u8>,
    /// `tied[i]`: rows `i` and `i + 1` lie in one block and agree so far.
    tied: Vec<bool>,
}

impl Builder {
    fn new(n: usize, a: usize, max_cols: usize, vars: usize) -> Self {
        let right: Vec<Entry> = (0..n).map(|i| if i < a { Entry::Var(1) } else { Entry::Star }).collect();
        let mut columns = Vec::new();
        let mut digits = vec![0u8; n];
        loop {
            let col: Vec<Entry> = digits.iter().map(|&d| Entry::from_code(d)).collect();
            if col.iter().any(|e| !e.is_star()) && col != right {
                columns.push(col);
            }
            // Odometer over codes 0..=vars.
            let mut i = 0;
            while i < n {
                if (digits[i] as usize) < vars {
                    digits[i] += 1;
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        columns.sort();
        Builder {
            n,
            a,
            max_cols,
            columns,
            right,
        }
    }

    fn run(&self, out: &mut Vec<ExtendedMatrix>) {
        let mut state = State {
            chosen: Vec::new(),
            next_new: (0..self.n).map(|i| if i < self.a { 2 } else { 1 }).collect(),
            tied: (0..self.n.saturating_sub(1)).map(|i| i + 1 != self.a).collect(),
        };
        self.extend(&mut state, 0, out);
    }

    fn extend(&self, st: &mut State, from: usize, out: &mut Vec<ExtendedMatrix>) {
        if !st.tied.iter().any(|&t| t) {
            out.push(self.emit(&st.chosen));
        }
        if st.chosen.len() == self.max_cols {
            return;
        }
        for ci in from..self.columns.len() {
            let col = &self.columns[ci];
            let Some((next_new, tied)) = self.admit(st, col) else {
                continue;
            };
            let saved_next = std::mem::replace(&mut st.next_new, next_new);
            let saved_tied = std::mem::replace(&mut st.tied, tied);
            st.chosen.push(ci);
            self.extend(st, ci + 1, out);
            st.chosen.pop();
            st.next_new = saved_next;
            st.tied = saved_tied;
        }
    }

    /// Checks the variable-order and row-order rules for appending `col`.
    fn admit(&self, st: &State, col: &[Entry]) -> Option<(Vec<u8>, Vec<bool>)> {
        let mut next_new = st.next_new.clone();
        for (i, e) in col.iter().enumerate() {
            if let Entry::Var(v) = *e {
                let first_block_x1 = i < self.a && v == 1;
                if !first_block_x1 {
                    if v > next_new[i] {
                        return None;
                    }
                    if v == next_new[i] {
                        next_new[i] += 1;
                    }
                }
            }
        }
        let mut tied = st.tied.clone();
        for i in 0..tied.len() {
            if tied[i] {
                match col[i].cmp(&col[i + 1]) {
                    std::cmp::Ordering::Greater => return None,
                    std::cmp::Ordering::Less => tied[i] = false,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        Some((next_new, tied))
    }

    fn emit(&self, chosen: &[usize]) -> ExtendedMatrix {
        let mut cols: Vec<Vec<Entry>> = chosen.iter().map(|&c| self.columns[c].clone()).collect();
        cols.push(self.right.clone());
        let vars = cols
            .iter()
            .flatten()
            .map(|e| e.code() as usize)
            .max()
            .unwrap_or(0);
        ExtendedMatrix::from_columns(&cols, vars).expect("generated shape is valid")
    }
}
