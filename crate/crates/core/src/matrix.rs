//! Extended matrices over the free pointed set `{∗, x1, .., xk}`.
//!
//! An extended matrix has `n` rows and `m + 1` columns: `m` left columns
//! followed by the right column. Entries are either the constant `∗` or a
//! variable `x_i`. The text encoding writes `∗` as `*` and `x_i` as `i`:
//!
//! ```text
//! 1 2 2 | 1 ; 2 2 1 | 1
//! ```
//!
//! Rows are separated by `;` or a newline, and an optional header line
//! `#nmk n m k` pins the dimensions and the variable budget.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single matrix entry. The derived order is `x1 < x2 < … < xk < ∗`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    Var(u8),
    Star,
}

impl Entry {
    /// Symbol code used by the closure engine: `∗` is 0 and `x_i` is `i`.
    #[inline]
    pub fn code(self) -> u8 {
        match self {
            Entry::Star => 0,
            Entry::Var(i) => i,
        }
    }

    #[inline]
    pub fn from_code(code: u8) -> Entry {
        if code == 0 {
            Entry::Star
        } else {
            Entry::Var(code)
        }
    }

    #[inline]
    pub fn is_star(self) -> bool {
        matches!(self, Entry::Star)
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Star => f.write_str("*"),
            Entry::Var(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("a matrix needs at least one row")]
    NoRows,
    #[error("grid has {got} entries, expected {expected}")]
    GridSize { expected: usize, got: usize },
    #[error("variable x{index} exceeds the variable budget k = {vars}")]
    VariableOutOfRange { index: u8, vars: usize },
    #[error("variable index 0 is not allowed")]
    ZeroVariable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("variable index 0 is not allowed")]
    ZeroVariable,
    #[error("variable index {0} is too large")]
    IndexTooLarge(String),
    #[error("row is missing the `|` right-column separator")]
    MissingSeparator,
    #[error("row has more than one `|` separator")]
    ExtraSeparator,
    #[error("row must have exactly one right entry, found {0}")]
    RightEntryCount(usize),
    #[error("ragged rows: expected {expected} left entries, found {found}")]
    RaggedRows { expected: usize, found: usize },
    #[error("matrix text contains no rows")]
    Empty,
    #[error("malformed header: {0}")]
    Header(String),
    #[error("header declares {declared} but the matrix has {actual}")]
    HeaderMismatch { declared: String, actual: String },
}

/// Parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// An `n × (m + 1)` extended matrix with a declared variable budget `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtendedMatrix {
    rows: usize,
    left_cols: usize,
    vars: usize,
    grid: Vec<Entry>,
}

impl ExtendedMatrix {
    /// Builds a matrix from a row-major grid of `rows × (left_cols + 1)` entries.
    pub fn new(
        rows: usize,
        left_cols: usize,
        vars: usize,
        grid: Vec<Entry>,
    ) -> Result<Self, MatrixError> {
        if rows == 0 {
            return Err(MatrixError::NoRows);
        }
        let expected = rows * (left_cols + 1);
        if grid.len() != expected {
            return Err(MatrixError::GridSize {
                expected,
                got: grid.len(),
            });
        }
        for e in &grid {
            if let Entry::Var(i) = *e {
                if i == 0 {
                    return Err(MatrixError::ZeroVariable);
                }
                if i as usize > vars {
                    return Err(MatrixError::VariableOutOfRange { index: i, vars });
                }
            }
        }
        Ok(ExtendedMatrix {
            rows,
            left_cols,
            vars,
            grid,
        })
    }

    /// Builds a matrix from symbol codes (`0` is `∗`), one slice per row with
    /// the right entry last. The variable budget is the largest index used.
    ///
    /// Panics on ragged or empty input; intended for literals.
    pub fn from_codes(rows: &[&[u8]]) -> Self {
        assert!(!rows.is_empty(), "matrix needs a row");
        let width = rows[0].len();
        assert!(width >= 1, "every row needs a right entry");
        let mut grid = Vec::with_capacity(rows.len() * width);
        for r in rows {
            assert_eq!(r.len(), width, "ragged rows");
            grid.extend(r.iter().map(|&c| Entry::from_code(c)));
        }
        let vars = grid.iter().map(|e| e.code() as usize).max().unwrap_or(0);
        ExtendedMatrix {
            rows: rows.len(),
            left_cols: width - 1,
            vars,
            grid,
        }
    }

    pub(crate) fn from_parts_unchecked(
        rows: usize,
        left_cols: usize,
        vars: usize,
        grid: Vec<Entry>,
    ) -> Self {
        debug_assert_eq!(grid.len(), rows * (left_cols + 1));
        ExtendedMatrix {
            rows,
            left_cols,
            vars,
            grid,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn left_cols(&self) -> usize {
        self.left_cols
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.left_cols + 1
    }

    /// The declared variable budget `k`.
    #[inline]
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// The largest variable index actually used (0 when the matrix is all `∗`).
    pub fn max_var(&self) -> usize {
        self.grid.iter().map(|e| e.code() as usize).max().unwrap_or(0)
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Entry {
        self.grid[row * self.width() + col]
    }

    #[inline]
    pub fn right(&self, row: usize) -> Entry {
        self.entry(row, self.left_cols)
    }

    /// The full row including the right entry as its last element.
    #[inline]
    pub fn row(&self, row: usize) -> &[Entry] {
        let w = self.width();
        &self.grid[row * w..(row + 1) * w]
    }

    #[inline]
    pub fn left_row(&self, row: usize) -> &[Entry] {
        let w = self.width();
        &self.grid[row * w..row * w + self.left_cols]
    }

    pub fn column(&self, col: usize) -> Vec<Entry> {
        (0..self.rows).map(|i| self.entry(i, col)).collect()
    }

    pub fn left_columns(&self) -> impl Iterator<Item = Vec<Entry>> + '_ {
        (0..self.left_cols).map(move |j| self.column(j))
    }

    pub fn right_column(&self) -> Vec<Entry> {
        self.column(self.left_cols)
    }

    pub fn grid(&self) -> &[Entry] {
        &self.grid
    }

    /// True when no entry is `∗` (a non-pointed matrix).
    pub fn is_star_free(&self) -> bool {
        !self.grid.iter().any(|e| e.is_star())
    }

    /// The same matrix viewed with a different variable budget.
    pub fn with_vars(&self, vars: usize) -> Result<Self, MatrixError> {
        ExtendedMatrix::new(self.rows, self.left_cols, vars, self.grid.clone())
    }

    /// The same matrix with the budget shrunk to the variables actually used.
    pub fn tight(&self) -> Self {
        let mut m = self.clone();
        m.vars = self.max_var();
        m
    }

    /// Assembles a matrix from columns; the last column is the right column.
    pub fn from_columns(columns: &[Vec<Entry>], vars: usize) -> Result<Self, MatrixError> {
        let rows = columns.first().map_or(0, |c| c.len());
        if rows == 0 {
            return Err(MatrixError::NoRows);
        }
        let width = columns.len();
        let mut grid = vec![Entry::Star; rows * width];
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(MatrixError::GridSize {
                    expected: rows * width,
                    got: col.len() * width,
                });
            }
            for (i, &e) in col.iter().enumerate() {
                grid[i * width + j] = e;
            }
        }
        ExtendedMatrix::new(rows, width - 1, vars, grid)
    }

    /// Assembles a matrix from full rows (right entry last).
    pub fn from_rows(rows: &[Vec<Entry>], vars: usize) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::NoRows);
        }
        let width = rows[0].len();
        let mut grid = Vec::with_capacity(n * width);
        for r in rows {
            if r.len() != width || width == 0 {
                return Err(MatrixError::GridSize {
                    expected: n * width,
                    got: r.len() * n,
                });
            }
            grid.extend_from_slice(r);
        }
        ExtendedMatrix::new(n, width - 1, vars, grid)
    }

    /// Matrix text: `1 2 2 | 1 ; 2 2 1 | 1`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rows {
            if i > 0 {
                s.push_str(" ; ");
            }
            for e in self.left_row(i) {
                s.push_str(&e.to_string());
                s.push(' ');
            }
            s.push_str("| ");
            s.push_str(&self.right(i).to_string());
        }
        s
    }

    /// Multi-line grid rendering, one row per line.
    pub fn to_grid_text(&self) -> String {
        (0..self.rows)
            .map(|i| {
                let left: Vec<String> = self.left_row(i).iter().map(|e| e.to_string()).collect();
                if left.is_empty() {
                    format!("| {}", self.right(i))
                } else {
                    format!("{} | {}", left.join(" "), self.right(i))
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// The lexicographic display key: right column first, then the left
    /// columns from left to right, each read top to bottom.
    pub fn lex_key(&self) -> LexKey {
        let mut key = Vec::with_capacity(self.grid.len());
        for i in 0..self.rows {
            key.push(self.right(i));
        }
        for j in 0..self.left_cols {
            for i in 0..self.rows {
                key.push(self.entry(i, j));
            }
        }
        LexKey(key)
    }

    /// Sort key used to pick canonical representatives: fewest rows, then
    /// fewest columns, then fewest variables, then the smallest [`LexKey`].
    pub fn canonical_order_key(&self) -> (usize, usize, usize, LexKey) {
        (self.rows, self.left_cols, self.max_var(), self.lex_key())
    }

    /// Renders the term equations `p(x_{i1},…,x_{im}) = x_{i,m+1}`.
    pub fn maltsev_condition(&self) -> String {
        fn sym(e: Entry) -> String {
            match e {
                Entry::Star => "∗".to_string(),
                Entry::Var(i) => format!("x{i}"),
            }
        }
        (0..self.rows)
            .map(|i| {
                let args: Vec<String> = self.left_row(i).iter().map(|&e| sym(e)).collect();
                format!("p({})={}", args.join(","), sym(self.right(i)))
            })
            .collect::<Vec<_>>()
            .join(" ; ")
    }

    /// Syntactic normal form with the same matrix class.
    ///
    /// Deletes duplicate rows, duplicate left columns and all-`∗` left
    /// columns, renames the variables of each row in order of first
    /// occurrence (right entry first, then left to right), and sorts rows
    /// and left columns. The passes repeat until nothing changes; every
    /// change strictly decreases `(rows, left_cols, lex_key)`, so the loop
    /// terminates at a fixed point and the result is idempotent.
    pub fn normalize(&self) -> ExtendedMatrix {
        let mut rows: Vec<Vec<Entry>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        loop {
            let before = rows.clone();

            dedup_preserving_order(&mut rows);
            drop_redundant_left_columns(&mut rows);
            for r in rows.iter_mut() {
                rename_row(r);
            }
            dedup_preserving_order(&mut rows);
            rows.sort_by_key(|a| row_sort_key(a));
            sort_left_columns(&mut rows);

            if rows == before {
                break;
            }
        }
        let width = rows[0].len();
        let grid: Vec<Entry> = rows.concat();
        ExtendedMatrix::from_parts_unchecked(rows.len(), width - 1, self.vars, grid)
    }

    /// True when [`normalize`](Self::normalize) leaves the matrix unchanged.
    pub fn is_normalized(&self) -> bool {
        self.normalize() == *self
    }

    /// Maps every entry through `f`, keeping the shape.
    pub fn map_entries(&self, vars: usize, f: impl Fn(Entry) -> Entry) -> Result<Self, MatrixError> {
        ExtendedMatrix::new(
            self.rows,
            self.left_cols,
            vars,
            self.grid.iter().map(|&e| f(e)).collect(),
        )
    }
}

fn row_sort_key(row: &[Entry]) -> Vec<Entry> {
    let mut key = Vec::with_capacity(row.len());
    key.push(*row.last().expect("row has a right entry"));
    key.extend_from_slice(&row[..row.len() - 1]);
    key
}

fn dedup_preserving_order(rows: &mut Vec<Vec<Entry>>) {
    let mut seen = std::collections::HashSet::new();
    rows.retain(|r| seen.insert(r.clone()));
}

fn drop_redundant_left_columns(rows: &mut [Vec<Entry>]) {
    let width = rows[0].len();
    let left = width - 1;
    let mut keep = Vec::with_capacity(left);
    let mut seen = std::collections::HashSet::new();
    for j in 0..left {
        let col: Vec<Entry> = rows.iter().map(|r| r[j]).collect();
        if col.iter().all(|e| e.is_star()) {
            continue;
        }
        if seen.insert(col) {
            keep.push(j);
        }
    }
    if keep.len() == left {
        return;
    }
    for r in rows.iter_mut() {
        let right = r[left];
        let mut nr: Vec<Entry> = keep.iter().map(|&j| r[j]).collect();
        nr.push(right);
        *r = nr;
    }
}

/// Renames the variables of one row in first-occurrence order, scanning the
/// right entry first and then the left entries from left to right.
pub(crate) fn rename_row(row: &mut [Entry]) {
    let last = row.len() - 1;
    let mut map: Vec<(u8, u8)> = Vec::new();
    let mut next = 1u8;
    let order = std::iter::once(last).chain(0..last);
    for j in order {
        if let Entry::Var(v) = row[j] {
            if !map.iter().any(|&(from, _)| from == v) {
                map.push((v, next));
                next += 1;
            }
        }
    }
    for e in row.iter_mut() {
        if let Entry::Var(v) = *e {
            let to = map.iter().find(|&&(from, _)| from == v).unwrap().1;
            *e = Entry::Var(to);
        }
    }
}

fn sort_left_columns(rows: &mut [Vec<Entry>]) {
    let width = rows[0].len();
    let left = width - 1;
    if left < 2 {
        return;
    }
    let mut cols: Vec<Vec<Entry>> = (0..left)
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect();
    cols.sort();
    for (i, r) in rows.iter_mut().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            r[j] = c[i];
        }
    }
}

/// Column-major flattening of a matrix, right column first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexKey(pub Vec<Entry>);

impl LexKey {
    pub fn entries(&self) -> &[Entry] {
        &self.0
    }
}

impl fmt::Display for ExtendedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl PartialOrd for ExtendedMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedMatrix {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_order_key()
            .cmp(&other.canonical_order_key())
            .then(self.vars.cmp(&other.vars))
    }
}

impl Serialize for ExtendedMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for ExtendedMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_matrix(&s).map_err(serde::de::Error::custom)
    }
}

impl FromStr for ExtendedMatrix {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_matrix(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Star,
    Var(u8),
    Bar,
    RowSep,
}

struct Header {
    n: usize,
    m: usize,
    k: usize,
}

/// Parses the matrix text format.
///
/// `k` is the largest variable index used unless a `#nmk n m k` header
/// pins it.
pub fn parse_matrix(text: &str) -> Result<ExtendedMatrix, ParseError> {
    let mut header: Option<Header> = None;
    let mut toks: Vec<(Tok, usize, usize)> = Vec::new();

    for (li, line) in text.lines().enumerate() {
        let lineno = li + 1;
        let trimmed = line.trim_start();
        if trimmed.starts_with('#') {
            let col = line.len() - trimmed.len() + 1;
            header = Some(parse_header(trimmed, lineno, col)?);
            continue;
        }
        let chars: Vec<char> = line.chars().collect();
        let mut c = 0;
        while c < chars.len() {
            let ch = chars[c];
            let col = c + 1;
            if ch.is_whitespace() {
                c += 1;
                continue;
            }
            match ch {
                '*' | '∗' => {
                    toks.push((Tok::Star, lineno, col));
                    c += 1;
                }
                '|' => {
                    toks.push((Tok::Bar, lineno, col));
                    c += 1;
                }
                ';' => {
                    toks.push((Tok::RowSep, lineno, col));
                    c += 1;
                }
                _ => {
                    let start = c;
                    while c < chars.len()
                        && !chars[c].is_whitespace()
                        && !matches!(chars[c], '|' | ';' | '*' | '∗')
                    {
                        c += 1;
                    }
                    let word: String = chars[start..c].iter().collect();
                    if !word.chars().all(|d| d.is_ascii_digit()) {
                        return Err(ParseError {
                            line: lineno,
                            column: col,
                            kind: ParseErrorKind::MalformedToken(word),
                        });
                    }
                    let value: u64 = word.parse().map_err(|_| ParseError {
                        line: lineno,
                        column: col,
                        kind: ParseErrorKind::IndexTooLarge(word.clone()),
                    })?;
                    if value == 0 {
                        return Err(ParseError {
                            line: lineno,
                            column: col,
                            kind: ParseErrorKind::ZeroVariable,
                        });
                    }
                    if value > u8::MAX as u64 {
                        return Err(ParseError {
                            line: lineno,
                            column: col,
                            kind: ParseErrorKind::IndexTooLarge(word),
                        });
                    }
                    toks.push((Tok::Var(value as u8), lineno, col));
                }
            }
        }
        toks.push((Tok::RowSep, lineno, chars.len() + 1));
    }

    // Split into rows; empty segments (blank lines, trailing `;`) are skipped.
    let mut rows: Vec<Vec<Entry>> = Vec::new();
    let mut left_width: Option<usize> = None;
    let mut seg: Vec<(Tok, usize, usize)> = Vec::new();
    let mut last_pos = (1, 1);
    for t in toks.into_iter() {
        last_pos = (t.1, t.2);
        if t.0 == Tok::RowSep {
            if !seg.is_empty() {
                let row = parse_row(&seg, t.1, t.2)?;
                let lw = row.len() - 1;
                match left_width {
                    None => left_width = Some(lw),
                    Some(w) if w != lw => {
                        return Err(ParseError {
                            line: seg[0].1,
                            column: seg[0].2,
                            kind: ParseErrorKind::RaggedRows {
                                expected: w,
                                found: lw,
                            },
                        })
                    }
                    _ => {}
                }
                rows.push(row);
                seg.clear();
            }
        } else {
            seg.push(t);
        }
    }
    if rows.is_empty() {
        return Err(ParseError {
            line: last_pos.0,
            column: last_pos.1,
            kind: ParseErrorKind::Empty,
        });
    }

    let used = rows
        .iter()
        .flatten()
        .map(|e| e.code() as usize)
        .max()
        .unwrap_or(0);
    let n = rows.len();
    let m = left_width.unwrap_or(0);
    let mut vars = used;
    if let Some(h) = header {
        if h.n != n || h.m != m {
            return Err(ParseError {
                line: 1,
                column: 1,
                kind: ParseErrorKind::HeaderMismatch {
                    declared: format!("n={} m={}", h.n, h.m),
                    actual: format!("n={n} m={m}"),
                },
            });
        }
        if h.k < used {
            return Err(ParseError {
                line: 1,
                column: 1,
                kind: ParseErrorKind::HeaderMismatch {
                    declared: format!("k={}", h.k),
                    actual: format!("variable x{used}"),
                },
            });
        }
        vars = h.k;
    }
    Ok(ExtendedMatrix::from_parts_unchecked(
        n,
        m,
        vars,
        rows.concat(),
    ))
}

fn parse_header(text: &str, line: usize, column: usize) -> Result<Header, ParseError> {
    let err = |msg: &str| ParseError {
        line,
        column,
        kind: ParseErrorKind::Header(msg.to_string()),
    };
    let mut parts = text.split_whitespace();
    if parts.next() != Some("#nmk") {
        return Err(err("expected `#nmk n m k`"));
    }
    let nums: Vec<usize> = parts
        .map(|p| p.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| err("dimensions must be non-negative integers"))?;
    if nums.len() != 3 {
        return Err(err("expected exactly three numbers"));
    }
    if nums[0] == 0 {
        return Err(err("n must be positive"));
    }
    Ok(Header {
        n: nums[0],
        m: nums[1],
        k: nums[2],
    })
}

fn parse_row(seg: &[(Tok, usize, usize)], end_line: usize, end_col: usize) -> Result<Vec<Entry>, ParseError> {
    let bars: Vec<usize> = seg
        .iter()
        .enumerate()
        .filter(|(_, t)| t.0 == Tok::Bar)
        .map(|(i, _)| i)
        .collect();
    if bars.is_empty() {
        return Err(ParseError {
            line: end_line,
            column: end_col,
            kind: ParseErrorKind::MissingSeparator,
        });
    }
    if bars.len() > 1 {
        let t = &seg[bars[1]];
        return Err(ParseError {
            line: t.1,
            column: t.2,
            kind: ParseErrorKind::ExtraSeparator,
        });
    }
    let bar = bars[0];
    let right = &seg[bar + 1..];
    if right.len() != 1 {
        let (line, column) = right.get(1).map_or((seg[bar].1, seg[bar].2), |t| (t.1, t.2));
        return Err(ParseError {
            line,
            column,
            kind: ParseErrorKind::RightEntryCount(right.len()),
        });
    }
    let to_entry = |t: &Tok| match t {
        Tok::Star => Entry::Star,
        Tok::Var(v) => Entry::Var(*v),
        _ => unreachable!("separators filtered"),
    };
    let mut row: Vec<Entry> = seg[..bar].iter().map(|t| to_entry(&t.0)).collect();
    row.push(to_entry(&right[0].0));
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> ExtendedMatrix {
        parse_matrix(s).unwrap()
    }

    #[test]
    fn parses_example_matrices() {
        let maltsev = m("1 2 2 | 1 ; 2 2 1 | 1");
        assert_eq!((maltsev.rows(), maltsev.left_cols(), maltsev.vars()), (2, 3, 2));
        assert_eq!(maltsev.entry(1, 2), Entry::Var(1));

        let top = m("| *");
        assert_eq!((top.rows(), top.left_cols(), top.vars()), (1, 0, 0));
        assert_eq!(top.right(0), Entry::Star);

        let sub = m("1 * | 1 ; 1 1 | *");
        assert_eq!(sub.right_column(), vec![Entry::Var(1), Entry::Star]);
        assert_eq!(sub.vars(), 1);
    }

    #[test]
    fn newline_rows_and_header() {
        let a = m("#nmk 2 2 3\n1 * | 1\n1 1 | *\n");
        assert_eq!(a.vars(), 3);
        assert_eq!(a.tight(), m("1 * | 1 ; 1 1 | *"));
        assert_eq!(m("1 *|1;1 1|*"), m("1 * | 1 ; 1 1 | *"));
    }

    #[test]
    fn parse_errors() {
        let e = parse_matrix("1 2 | 1 ; 1 | 1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::RaggedRows { expected: 2, found: 1 }));
        assert_eq!(e.line, 1);

        let e = parse_matrix("1 0 | 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ZeroVariable);
        assert_eq!(e.column, 3);

        let e = parse_matrix("1 2 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingSeparator);

        let e = parse_matrix("1 x | 1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::MalformedToken(_)));

        let e = parse_matrix("1 | 1 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::RightEntryCount(2));

        let e = parse_matrix("\n1 |").unwrap_err();
        assert_eq!((e.line, e.kind.clone()), (2, ParseErrorKind::RightEntryCount(0)));

        assert_eq!(parse_matrix(" ; ").unwrap_err().kind, ParseErrorKind::Empty);
        assert!(matches!(
            parse_matrix("#nmk 1 1 1\n2 | 1").unwrap_err().kind,
            ParseErrorKind::HeaderMismatch { .. }
        ));
    }

    #[test]
    fn text_round_trip() {
        for s in ["1 2 2 | 1 ; 2 2 1 | 1", "| *", "1 * * | 1 ; 2 2 1 | 1"] {
            assert_eq!(m(s).to_text(), s);
        }
    }

    #[test]
    fn lex_key_flattens_right_column_first() {
        let a = m("1 * | 1 ; * 1 | 1");
        let v = Entry::Var(1);
        let s = Entry::Star;
        assert_eq!(a.lex_key().entries(), &[v, v, v, s, s, v]);
        assert!(m("| 1").lex_key() < m("| *").lex_key());
    }

    #[test]
    fn normalize_examples() {
        let a = m("2 2 1 | 1 ; 1 2 2 | 1");
        let n = a.normalize();
        assert_eq!(n, m("1 2 2 | 1 ; 2 1 2 | 1"));
        assert_eq!(n.normalize(), n);

        assert_eq!(m("1 * * | 1 ; 2 * 1 | 1").normalize(), m("1 * | 1 ; 2 1 | 1"));
        assert_eq!(m("1 * 1 | 1 ; 1 * 1 | 1").normalize(), m("1 | 1").with_vars(1).unwrap());
        let already = m("1 * | 1 ; * 1 | 1");
        assert_eq!(already.normalize(), already);
    }

    #[test]
    fn maltsev_condition_rendering() {
        assert_eq!(m("1 * | 1 ; 1 1 | *").maltsev_condition(), "p(x1,∗)=x1 ; p(x1,x1)=∗");
        assert_eq!(
            m("1 2 2 | 1 ; 2 2 1 | 1").maltsev_condition(),
            "p(x1,x2,x2)=x1 ; p(x2,x2,x1)=x1"
        );
        assert_eq!(m("| *").maltsev_condition(), "p()=∗");
    }
}
