//! Exact linear algebra over `K` with valuation-aware pivoting.

mod matrix;
mod minors;
mod series;
mod smith;
mod solve;

pub use matrix::Matrix;
pub use minors::{weighted_invariants_by_minors, MAX_MINOR_DIM};
pub(crate) use series::{det_order, solve as series_solve, to_series, to_series_joint};
pub(crate) use smith::series_invariants;
pub use smith::{reduce, weighted_invariants, weighted_invariants_exact, Pivot, Tracking};
pub use solve::{determinant, inverse, rank, solve_in_basis, solve_matrix};

use crate::error::{Error, Result};
use crate::norms::DiagNorm;
use crate::rat::{Rat, Val};
use crate::valued_field::FieldElem;

/// `ν(det a)`, read from a certified truncated elimination when possible.
pub fn det_valuation(a: &Matrix) -> Result<Val> {
    if !a.is_square() {
        return Err(Error::Invalid("determinant of a non-square matrix".into()));
    }
    let ram = a.ramification();
    let mut rel = 16;
    while rel <= 512 {
        if let Some(o) = det_order(to_series(a, ram, rel)) {
            return Ok(Val::Finite(Rat::new(o.into(), (ram as i64).into())));
        }
        rel *= 2;
    }
    Ok(determinant(a)?.val())
}

/// `max { ν_n(v) : v ∈ target + span(S) }`, the valuation of the quotient
/// norm at the class of `target` modulo the column span of `s`.
///
/// Works in the diagonal coordinates of `n`: the column entry with the
/// smallest weighted valuation is used to clear its row from the target and
/// from the other columns, after which that row no longer constrains the
/// translate.
pub fn min_val_on_translate(target: &[FieldElem], s: &Matrix, n: &DiagNorm) -> Result<Rat> {
    if s.rows() != n.dim() {
        return Err(Error::DimensionMismatch {
            expected: n.dim(),
            got: s.rows(),
        });
    }
    let mut x = n.coords(target)?;
    let mut y = if s.cols() == 0 {
        Matrix::zeros(n.dim(), 0)
    } else {
        n.inverse_basis()?.mul(s)?
    };
    let w = n.weights();
    let mut row_active = vec![true; n.dim()];
    let mut col_active = vec![true; y.cols()];
    loop {
        let mut best: Option<(Rat, usize, usize)> = None;
        for i in (0..y.rows()).filter(|&i| row_active[i]) {
            for j in (0..y.cols()).filter(|&j| col_active[j]) {
                let Val::Finite(v) = y[(i, j)].val() else {
                    continue;
                };
                let v = v + &w[i];
                if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else {
            break;
        };
        let inv = y[(pi, pj)].inv()?;
        let col = y.column(pj);
        if !x[pi].is_zero() {
            let m = &x[pi] * &inv;
            for (xr, c) in x.iter_mut().zip(&col) {
                if !c.is_zero() {
                    *xr = &*xr - &(&m * c);
                }
            }
        }
        for c in (0..y.cols()).filter(|&c| c != pj && col_active[c]) {
            if y[(pi, c)].is_zero() {
                continue;
            }
            let m = &y[(pi, c)] * &inv;
            y.col_axpy(c, pj, &m);
        }
        row_active[pi] = false;
        col_active[pj] = false;
    }
    (0..x.len())
        .filter(|&i| row_active[i])
        .map(|i| x[i].val().shifted(&w[i]))
        .min()
        .and_then(|v| v.finite().cloned())
        .ok_or(Error::ZeroClass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_invertible, random_matrix, random_rats};
    use crate::rat::{int, rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t() -> FieldElem {
        FieldElem::t()
    }

    fn c(k: i64) -> FieldElem {
        FieldElem::from_int(k)
    }

    fn m(rows: Vec<Vec<FieldElem>>) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn solve_examples() {
        let v = vec![c(3), &t() + &c(1)];
        assert_eq!(solve_in_basis(&Matrix::identity(2), &v).unwrap(), v);
        let b = m(vec![vec![c(1), c(0)], vec![t(), c(1)]]);
        assert_eq!(solve_in_basis(&b, &[c(0), c(1)]).unwrap(), vec![c(0), c(1)]);
        let singular = m(vec![vec![c(1), c(2)], vec![c(2), c(4)]]);
        assert!(matches!(
            solve_in_basis(&singular, &[c(1), c(0)]),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn solve_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let d = rng.gen_range(1..=5);
            let b = random_invertible(&mut rng, d, 1);
            let v = random_matrix(&mut rng, d, 1, 1).column(0);
            let x = solve_in_basis(&b, &v).unwrap();
            assert_eq!(b.mul_vec(&x).unwrap(), v);
        }
    }

    #[test]
    fn invariants_examples() {
        let zero = vec![Rat::from_integer(0.into()); 2];
        assert_eq!(
            weighted_invariants(
                &Matrix::identity(3),
                &[int(0), int(0), int(0)],
                &[int(0), int(0), int(0)]
            )
            .unwrap(),
            vec![int(0); 3]
        );
        let diag = Matrix::diagonal(vec![t(), t().pow(3)]);
        assert_eq!(
            weighted_invariants(&diag, &zero, &zero).unwrap(),
            vec![int(1), int(3)]
        );
        let a = m(vec![vec![c(1), c(1)], vec![c(1), &c(1) + &t()]]);
        assert_eq!(
            weighted_invariants(&a, &zero, &zero).unwrap(),
            vec![int(0), int(1)]
        );
        assert_eq!(
            weighted_invariants_by_minors(&a, &zero, &zero).unwrap(),
            vec![int(0), int(1)]
        );
        let singular = m(vec![vec![c(1), c(1)], vec![c(1), c(1)]]);
        assert!(weighted_invariants(&singular, &zero, &zero).is_err());
        assert!(weighted_invariants_by_minors(&singular, &zero, &zero).is_err());
    }

    #[test]
    fn minors_agree_with_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let d = rng.gen_range(1..=6);
            let ram = [1, 1, 2, 3][rng.gen_range(0..4)];
            let t = random_invertible(&mut rng, d, ram);
            let row = random_rats(&mut rng, d, 6);
            let col = random_rats(&mut rng, d, 6);
            assert_eq!(
                weighted_invariants(&t, &row, &col).unwrap(),
                weighted_invariants_by_minors(&t, &row, &col).unwrap()
            );
        }
    }

    #[test]
    fn invariants_of_inverse_are_negated_and_reversed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let d = rng.gen_range(1..=4);
            let t = random_invertible(&mut rng, d, 1);
            let row = random_rats(&mut rng, d, 4);
            let col = random_rats(&mut rng, d, 4);
            let forward = weighted_invariants(&t, &row, &col).unwrap();
            let neg_row: Vec<Rat> = row.iter().map(|r| -r).collect();
            let neg_col: Vec<Rat> = col.iter().map(|r| -r).collect();
            let back = weighted_invariants(&inverse(&t).unwrap(), &neg_col, &neg_row).unwrap();
            let expected: Vec<Rat> = forward.iter().rev().map(|s| -s).collect();
            assert_eq!(back, expected);
        }
    }

    #[test]
    fn invariants_sum_to_shifted_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..40 {
            let d = rng.gen_range(1..=5);
            let t = random_invertible(&mut rng, d, 2);
            let row = random_rats(&mut rng, d, 4);
            let col = random_rats(&mut rng, d, 4);
            let sum: Rat = weighted_invariants(&t, &row, &col)
                .unwrap()
                .into_iter()
                .sum();
            let det = determinant(&t).unwrap().val_finite();
            let shifts: Rat = row.iter().chain(&col).sum();
            assert_eq!(sum, det + shifts);
        }
    }

    #[test]
    fn translate_examples() {
        let n = DiagNorm::trivial(2);
        let e1 = vec![c(1), c(0)];
        assert_eq!(
            min_val_on_translate(&e1, &Matrix::zeros(2, 0), &n).unwrap(),
            int(0)
        );
        let s = Matrix::from_columns(&[vec![c(1), c(1)]]).unwrap();
        assert_eq!(min_val_on_translate(&e1, &s, &n).unwrap(), int(0));
        let s = Matrix::from_columns(&[vec![c(1), t()]]).unwrap();
        assert_eq!(min_val_on_translate(&e1, &s, &n).unwrap(), int(1));
        let s = Matrix::from_columns(&[vec![c(2), c(0)]]).unwrap();
        assert!(matches!(
            min_val_on_translate(&e1, &s, &n),
            Err(Error::ZeroClass)
        ));
        let weighted = DiagNorm::monomial(vec![rat(1, 2), int(-1)]);
        let target = vec![c(1), t()];
        assert_eq!(
            min_val_on_translate(&target, &Matrix::zeros(2, 0), &weighted).unwrap(),
            int(0)
        );
    }

    #[test]
    fn translate_dominates_every_point_of_the_translate() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let d = rng.gen_range(2..=4);
            let k = rng.gen_range(0..d);
            let n = crate::random::random_diag_norm(&mut rng, d, 1);
            let s = random_matrix(&mut rng, d, k, 1);
            let target = random_matrix(&mut rng, d, 1, 1).column(0);
            let Ok(best) = min_val_on_translate(&target, &s, &n) else {
                continue;
            };
            for _ in 0..10 {
                let coeffs = random_matrix(&mut rng, k, 1, 1);
                let shift = if k == 0 {
                    vec![FieldElem::zero(); d]
                } else {
                    s.mul(&coeffs).unwrap().column(0)
                };
                let v: Vec<FieldElem> = target.iter().zip(&shift).map(|(a, b)| a + b).collect();
                assert!(n.eval(&v).unwrap() <= Val::Finite(best.clone()));
            }
        }
    }
}
