//! Valuation-pivoted two-sided elimination (Smith form over the valuation ring).
//!
//! The engine works on `T` together with rational row and column shifts and
//! treats the shifted valuation `ν(T_ij) + r_i + c_j` as if the matrix had
//! been rescaled by `t^r` and `t^c`. Because every elimination multiplier has
//! nonnegative shifted valuation, the operations are unimodular for the
//! rescaled matrix and no explicit `t^(rational)` scaling is ever formed.

use crate::error::{Error, Result};
use crate::rat::{Rat, Val};
use crate::valued_field::FieldElem;

use super::series::{self, to_series, Reduction, SeriesMatrix};
use super::Matrix;

#[derive(Debug, Clone)]
pub struct Pivot {
    pub row: usize,
    pub col: usize,
    /// Shifted valuation `ν(entry) + r_row + c_col`.
    pub value: Rat,
    pub entry: FieldElem,
}

/// Optional bookkeeping for the elimination.
#[derive(Default)]
pub struct Tracking<'a> {
    /// Columns of this matrix receive every column operation applied to `T`.
    pub columns: Option<&'a mut Matrix>,
    /// Maintained as `U^{-1}` where `U` accumulates the row operations.
    pub row_inverse: Option<&'a mut Matrix>,
}

/// Eliminate `t` completely, pivoting on minimal shifted valuation with
/// ties broken by the lexicographically smallest `(row, col)`.
///
/// Returns the pivots in the order they were chosen; their values are
/// non-decreasing.
pub fn reduce(
    t: &Matrix,
    row_shifts: &[Rat],
    col_shifts: &[Rat],
    mut tracking: Tracking<'_>,
) -> Result<Vec<Pivot>> {
    check_shifts(t, row_shifts, col_shifts)?;
    let mut t = t.clone();
    let mut row_active = vec![true; t.rows()];
    let mut col_active = vec![true; t.cols()];
    let mut pivots = Vec::new();

    loop {
        let mut best: Option<(Rat, usize, usize)> = None;
        for i in (0..t.rows()).filter(|&i| row_active[i]) {
            for j in (0..t.cols()).filter(|&j| col_active[j]) {
                let Val::Finite(v) = t[(i, j)].val() else {
                    continue;
                };
                let shifted = v + &row_shifts[i] + &col_shifts[j];
                if best.as_ref().is_none_or(|(b, _, _)| shifted < *b) {
                    best = Some((shifted, i, j));
                }
            }
        }
        let Some((value, pi, pj)) = best else {
            break;
        };
        let entry = t[(pi, pj)].clone();
        let inv = entry.inv()?;

        for l in (0..t.rows()).filter(|&l| l != pi && row_active[l]) {
            if t[(l, pj)].is_zero() {
                continue;
            }
            let m = &t[(l, pj)] * &inv;
            t.row_axpy(l, pi, &m);
            if let Some(q) = tracking.row_inverse.as_deref_mut() {
                // U <- E U with E = I - m e_l e_pi^T, so U^{-1} <- U^{-1} E^{-1}.
                q.col_axpy(pi, l, &-&m);
            }
        }
        for c in (0..t.cols()).filter(|&c| c != pj && col_active[c]) {
            if t[(pi, c)].is_zero() {
                continue;
            }
            let m = &t[(pi, c)] * &inv;
            t[(pi, c)] = FieldElem::zero();
            if let Some(cols) = tracking.columns.as_deref_mut() {
                cols.col_axpy(c, pj, &m);
            }
        }
        row_active[pi] = false;
        col_active[pj] = false;
        pivots.push(Pivot {
            row: pi,
            col: pj,
            value,
            entry,
        });
    }
    Ok(pivots)
}

const START_PRECISION: usize = 16;
const MAX_PRECISION: usize = 512;

/// Pivot values of the certified series elimination, ascending, in
/// valuation units. `build` expands the matrix to a given relative
/// precision, each row scaled by a scalar of the returned `u`-order;
/// `None` from either stage asks for more precision. Returns
/// `None` once the precision cap is reached.
pub(crate) fn series_invariants(
    build: impl Fn(usize) -> Option<(SeriesMatrix, Vec<i64>)>,
    ram: u32,
    row_shifts: &[Rat],
    col_shifts: &[Rat],
) -> Option<Vec<Rat>> {
    let n = Rat::from_integer((ram as i64).into());
    let row: Vec<Rat> = row_shifts.iter().map(|r| r * &n).collect();
    let col: Vec<Rat> = col_shifts.iter().map(|c| c * &n).collect();
    let mut rel = START_PRECISION;
    while rel <= MAX_PRECISION {
        let built = build(rel);
        if let Some((t, row_orders)) = built {
            let row: Vec<Rat> = row
                .iter()
                .zip(&row_orders)
                .map(|(r, o)| r - Rat::from_integer((*o).into()))
                .collect();
            if let Reduction::Pivots(p) = series::reduce(t, &row, &col) {
                let mut values: Vec<Rat> = p.into_iter().map(|(_, _, v)| v / &n).collect();
                values.sort();
                return Some(values);
            }
        }
        rel *= 2;
    }
    None
}

/// Invariant-factor valuations of the shift-scaled square matrix, ascending.
///
/// Runs the pivoting elimination on truncated expansions, falling back to
/// exact arithmetic only if no affordable precision certifies the pivots.
pub fn weighted_invariants(t: &Matrix, row_shifts: &[Rat], col_shifts: &[Rat]) -> Result<Vec<Rat>> {
    if !t.is_square() {
        return Err(Error::Invalid(
            "weighted invariants need a square matrix".into(),
        ));
    }
    check_shifts(t, row_shifts, col_shifts)?;
    let ram = t.ramification();
    let values = series_invariants(
        |rel| Some((to_series(t, ram, rel), vec![0; t.rows()])),
        ram,
        row_shifts,
        col_shifts,
    );
    match values {
        Some(v) if v.len() == t.rows() => Ok(v),
        Some(v) => Err(Error::Singular {
            rank: v.len(),
            dim: t.rows(),
        }),
        None => weighted_invariants_exact(t, row_shifts, col_shifts),
    }
}

/// The same invariants computed with exact rational-function arithmetic.
pub fn weighted_invariants_exact(
    t: &Matrix,
    row_shifts: &[Rat],
    col_shifts: &[Rat],
) -> Result<Vec<Rat>> {
    if !t.is_square() {
        return Err(Error::Invalid(
            "weighted invariants need a square matrix".into(),
        ));
    }
    let pivots = reduce(t, row_shifts, col_shifts, Tracking::default())?;
    if pivots.len() < t.rows() {
        return Err(Error::Singular {
            rank: pivots.len(),
            dim: t.rows(),
        });
    }
    let mut values: Vec<Rat> = pivots.into_iter().map(|p| p.value).collect();
    values.sort();
    Ok(values)
}

fn check_shifts(t: &Matrix, row_shifts: &[Rat], col_shifts: &[Rat]) -> Result<()> {
    if row_shifts.len() != t.rows() {
        return Err(Error::DimensionMismatch {
            expected: t.rows(),
            got: row_shifts.len(),
        });
    }
    if col_shifts.len() != t.cols() {
        return Err(Error::DimensionMismatch {
            expected: t.cols(),
            got: col_shifts.len(),
        });
    }
    Ok(())
}
