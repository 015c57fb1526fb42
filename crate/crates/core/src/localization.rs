//! Bourn localization of pointed matrix classes.
//!
//! `localize(N)` prepends a left column of `∗` and then renames every `∗` to a
//! fresh variable; the resulting `∗`-free matrix presents the localization of
//! `mclex∗{N}` as a non-pointed class. Non-pointed implications between
//! non-trivial matrices with a left column agree with the pointed ones, so
//! every comparison here runs on the pointed engine.

use log::warn;
use thiserror::Error;

use crate::closure::{implies, ClosureError};
use crate::degeneracy::is_trivial;
use crate::matrix::{Entry, ExtendedMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalizationError {
    #[error("matrix contains ∗ entries; a ∗-free matrix is required")]
    NotStarFree,
    #[error("variable index must be at least 1")]
    ZeroVariable,
    #[error("matrix variable budget exceeded")]
    Budget,
    #[error("group is empty")]
    EmptyGroup,
    #[error("group members do not share a localization")]
    Incoherent,
    #[error(transparent)]
    Closure(#[from] ClosureError),
}

/// Witness that `(M, x)` is admissible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleWitness {
    pub matrix: ExtendedMatrix,
    pub var: u8,
    /// Zero-based left column that carries `x` in every row mentioning `x`.
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedMatrix {
    pub source: ExtendedMatrix,
    pub result: ExtendedMatrix,
}

/// `M[x→∗]`: every occurrence of `x_var` replaced by `∗`.
pub fn substitute_star(m: &ExtendedMatrix, var: u8) -> Result<ExtendedMatrix, LocalizationError> {
    if !m.is_star_free() {
        return Err(LocalizationError::NotStarFree);
    }
    if var == 0 {
        return Err(LocalizationError::ZeroVariable);
    }
    if !m.grid().contains(&Entry::Var(var)) {
        warn!("x{var} does not occur in {m}; substitution leaves it unchanged");
    }
    m.map_entries(m.vars(), |e| if e == Entry::Var(var) { Entry::Star } else { e })
        .map_err(|_| LocalizationError::Budget)
}

/// Finds the first left column `j` such that every row containing `x_var`
/// (on either side) has `x_var` at position `j`.
pub fn is_admissible(m: &ExtendedMatrix, var: u8) -> Result<Option<AdmissibleWitness>, LocalizationError> {
    if !m.is_star_free() {
        return Err(LocalizationError::NotStarFree);
    }
    let x = Entry::Var(var);
    let column = (0..m.left_cols()).find(|&j| {
        (0..m.rows()).all(|i| !m.row(i).contains(&x) || m.entry(i, j) == x)
    });
    Ok(column.map(|column| AdmissibleWitness {
        matrix: m.clone(),
        var,
        column,
    }))
}

/// `N_loc`: a new first left column of `∗`, then every `∗` becomes `x_{k+1}`.
pub fn localize(n: &ExtendedMatrix) -> LocalizedMatrix {
    let k = n.vars();
    let fresh = Entry::Var((k + 1) as u8);
    let rows: Vec<Vec<Entry>> = (0..n.rows())
        .map(|i| {
            std::iter::once(Entry::Star)
                .chain(n.row(i).iter().copied())
                .map(|e| if e.is_star() { fresh } else { e })
                .collect()
        })
        .collect();
    let result = ExtendedMatrix::from_rows(&rows, k + 1).expect("shape is preserved");
    LocalizedMatrix {
        source: n.clone(),
        result,
    }
}

/// Whether `A` and `B` have the same Bourn localization.
pub fn loc_equal(a: &ExtendedMatrix, b: &ExtendedMatrix) -> Result<bool, LocalizationError> {
    match (is_trivial(a), is_trivial(b)) {
        (true, true) => return Ok(true),
        (true, false) | (false, true) => return Ok(false),
        _ => {}
    }
    let al = localize(a).result;
    let bl = localize(b).result;
    Ok(implies(std::slice::from_ref(&al), std::slice::from_ref(&bl))? && implies(&[bl], &[al])?)
}

/// Whether the localization of `mclex∗{A}` is `mclex{anchor}` for a `∗`-free
/// `anchor` with at least one left column.
///
/// Uses the two halves of the restriction/localization adjunction:
/// `mclex{anchor} ⊆ Loc(mclex∗{A})` iff `mclex∗{anchor} ⊆ mclex∗{A}`, and
/// `Loc(mclex∗{A}) ⊆ mclex{anchor}` iff `A_loc` implies `anchor`. The answer
/// agrees with `loc_equal(A, anchor)`.
pub fn localizes_to(a: &ExtendedMatrix, anchor: &ExtendedMatrix) -> Result<bool, LocalizationError> {
    if !anchor.is_star_free() {
        return Err(LocalizationError::NotStarFree);
    }
    let (ta, tb) = (is_trivial(a), is_trivial(anchor));
    if ta || tb {
        return Ok(ta && tb);
    }
    if !implies(std::slice::from_ref(anchor), std::slice::from_ref(a))? {
        return Ok(false);
    }
    Ok(implies(&[localize(a).result], std::slice::from_ref(anchor))?)
}

/// The member whose class lies below every other member of the group, if
/// the window contains one.
///
/// Members are tried in order; checks are pairwise decisions.
pub fn loc_bottom(group: &[ExtendedMatrix]) -> Result<Option<ExtendedMatrix>, LocalizationError> {
    let Some(first) = group.first() else {
        return Err(LocalizationError::EmptyGroup);
    };
    for m in &group[1..] {
        if !loc_equal(first, m)? {
            return Err(LocalizationError::Incoherent);
        }
    }
    for (i, cand) in group.iter().enumerate() {
        let mut below_all = true;
        for (j, other) in group.iter().enumerate() {
            if i != j && !implies(std::slice::from_ref(cand), std::slice::from_ref(other))? {
                below_all = false;
                break;
            }
        }
        if below_all {
            return Ok(Some(cand.clone()));
        }
    }
    Ok(None)
}
