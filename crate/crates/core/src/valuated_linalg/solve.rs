use crate::error::{Error, Result};
use crate::valued_field::FieldElem;

use super::Matrix;

/// Row-reduce `[a | rhs]` and return `a^{-1} rhs`.
///
/// Pivots are chosen by minimal valuation within the column.
pub fn solve_matrix(a: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Invalid(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if rhs.rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: rhs.rows(),
        });
    }
    let d = a.rows();
    let mut a = a.clone();
    let mut x = rhs.clone();
    for col in 0..d {
        let pivot = (col..d)
            .filter(|&r| !a[(r, col)].is_zero())
            .min_by_key(|&r| a[(r, col)].val())
            .ok_or(Error::Singular { rank: col, dim: d })?;
        a.swap_rows(col, pivot);
        x.swap_rows(col, pivot);
        let inv = a[(col, col)].inv()?;
        for r in 0..d {
            if r == col || a[(r, col)].is_zero() {
                continue;
            }
            let f = &a[(r, col)] * &inv;
            a.row_axpy(r, col, &f);
            x.row_axpy(r, col, &f);
        }
    }
    for r in 0..d {
        let inv = a[(r, r)].inv()?;
        for j in 0..x.cols() {
            if !x[(r, j)].is_zero() {
                x[(r, j)] = &x[(r, j)] * &inv;
            }
        }
    }
    Ok(x)
}

/// Coordinates of `v` in the basis given by the columns of `basis`.
pub fn solve_in_basis(basis: &Matrix, v: &[FieldElem]) -> Result<Vec<FieldElem>> {
    let rhs = Matrix::from_columns(&[v.to_vec()])?;
    Ok(solve_matrix(basis, &rhs)?.column(0))
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    solve_matrix(a, &Matrix::identity(a.rows()))
}

pub fn determinant(a: &Matrix) -> Result<FieldElem> {
    if !a.is_square() {
        return Err(Error::Invalid("determinant of a non-square matrix".into()));
    }
    let d = a.rows();
    let mut a = a.clone();
    let mut det = FieldElem::one();
    for col in 0..d {
        let Some(pivot) = (col..d)
            .filter(|&r| !a[(r, col)].is_zero())
            .min_by_key(|&r| a[(r, col)].val())
        else {
            return Ok(FieldElem::zero());
        };
        if pivot != col {
            a.swap_rows(col, pivot);
            det = -det;
        }
        let inv = a[(col, col)].inv()?;
        for r in col + 1..d {
            if a[(r, col)].is_zero() {
                continue;
            }
            let f = &a[(r, col)] * &inv;
            a.row_axpy(r, col, &f);
        }
        det = &det * &a[(col, col)];
    }
    Ok(det)
}

pub fn rank(a: &Matrix) -> usize {
    let mut a = a.clone();
    let mut rank = 0;
    for col in 0..a.cols() {
        let Some(pivot) = (rank..a.rows()).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(rank, pivot);
        let inv = a[(rank, col)].inv().expect("nonzero pivot");
        for r in rank + 1..a.rows() {
            if a[(r, col)].is_zero() {
                continue;
            }
            let f = &a[(r, col)] * &inv;
            a.row_axpy(r, rank, &f);
        }
        rank += 1;
    }
    rank
}
