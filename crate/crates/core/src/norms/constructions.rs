//! Functorial constructions: powers, quotients, lattice approximation.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{floor, int, rat, Rat};
use crate::valuated_linalg::{determinant, reduce, Matrix, Tracking};
use crate::valued_field::FieldElem;

use super::DiagNorm;

/// Non-decreasing index sequences of length `k` over `0..d`, in lex order.
pub fn multisets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            go(i, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, d, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Strictly increasing index sequences of length `k` over `0..d`, in lex order.
pub fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    multisets(d, k)
        .into_iter()
        .filter(|s| s.windows(2).all(|w| w[0] < w[1]))
        .collect()
}

fn tuples(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..d).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

fn check_power(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Invalid("power must be at least 1".into()));
    }
    Ok(())
}

/// `n^{⊗k}` on `V^{⊗k}`, diagonal in the tensor basis with summed weights.
/// Index tuples are ordered lexicographically, first factor most significant.
pub fn tensor_power(n: &DiagNorm, k: usize) -> Result<DiagNorm> {
    check_power(k)?;
    let idx = tuples(n.dim(), k);
    let a = n.basis();
    let mut basis = Matrix::zeros(idx.len(), idx.len());
    for (r, e) in idx.iter().enumerate() {
        for (c, i) in idx.iter().enumerate() {
            let mut x = FieldElem::one();
            for (&ej, &ij) in e.iter().zip(i) {
                x = &x * &a[(ej, ij)];
                if x.is_zero() {
                    break;
                }
            }
            basis[(r, c)] = x;
        }
    }
    let weights = idx.iter().map(|i| sum_weights(n, i)).collect();
    DiagNorm::from_parts(basis, weights)
}

/// `Sym^k n` on `Sym^k V` (residue characteristic zero): diagonal in the
/// products `b_{i_1}⋯b_{i_k}` with summed weights. Ambient coordinates are
/// the monomials in the standard basis, indexed by [`multisets`]`(d, k)`.
pub fn sym_power(n: &DiagNorm, k: usize) -> Result<DiagNorm> {
    check_power(k)?;
    let d = n.dim();
    let idx = multisets(d, k);
    let position: HashMap<&[usize], usize> = idx
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let a = n.basis();
    let mut basis = Matrix::zeros(idx.len(), idx.len());
    for (c, multiset) in idx.iter().enumerate() {
        // Expand the product of basis vectors as a polynomial in e_0..e_{d-1}.
        let mut poly: HashMap<Vec<usize>, FieldElem> =
            HashMap::from([(Vec::new(), FieldElem::one())]);
        for &i in multiset {
            let mut next: HashMap<Vec<usize>, FieldElem> = HashMap::new();
            for (mono, coeff) in &poly {
                for e in 0..d {
                    let entry = &a[(e, i)];
                    if entry.is_zero() {
                        continue;
                    }
                    let mut m = mono.clone();
                    let at = m.partition_point(|&x| x <= e);
                    m.insert(at, e);
                    let term = coeff * entry;
                    let slot = next.entry(m).or_insert_with(FieldElem::zero);
                    *slot = &*slot + &term;
                }
            }
            poly = next;
        }
        for (mono, coeff) in poly {
            if !coeff.is_zero() {
                basis[(position[mono.as_slice()], c)] = coeff;
            }
        }
    }
    let weights = idx.iter().map(|i| sum_weights(n, i)).collect();
    DiagNorm::from_parts(basis, weights)
}

/// `∧^k n` on `∧^k V`: diagonal in the wedges of basis vectors with summed
/// weights. Coordinates are `k x k` minors indexed by [`subsets`]`(d, k)`.
pub fn ext_power(n: &DiagNorm, k: usize) -> Result<DiagNorm> {
    check_power(k)?;
    if k > n.dim() {
        return Err(Error::Invalid(format!(
            "exterior power {k} of a {}-dimensional space is zero",
            n.dim()
        )));
    }
    let idx = subsets(n.dim(), k);
    let a = n.basis();
    let mut basis = Matrix::zeros(idx.len(), idx.len());
    for (r, rows) in idx.iter().enumerate() {
        for (c, cols) in idx.iter().enumerate() {
            basis[(r, c)] = determinant(&a.select(rows, cols))?;
        }
    }
    let weights = idx.iter().map(|i| sum_weights(n, i)).collect();
    DiagNorm::from_parts(basis, weights)
}

fn sum_weights(n: &DiagNorm, idx: &[usize]) -> Rat {
    idx.iter().map(|&i| &n.weights()[i]).sum()
}

/// Quotient norm on `W` induced by a surjection `A: V -> W`:
/// `ν(w) = max { ν_n(v) : A v = w }`.
///
/// The images `A b_j` with weights `w_j` generate the unit ball; a
/// valuation-pivoted reduction of those generators yields a diagonal basis.
pub fn quotient_norm(n: &DiagNorm, a: &Matrix) -> Result<DiagNorm> {
    if a.cols() != n.dim() {
        return Err(Error::DimensionMismatch {
            expected: n.dim(),
            got: a.cols(),
        });
    }
    let e = a.rows();
    if e == 0 {
        return Err(Error::Invalid("quotient onto the zero space".into()));
    }
    let generators = a.mul(n.basis())?;
    let neg_w: Vec<Rat> = n.weights().iter().map(|w| -w).collect();
    let mut q = Matrix::identity(e);
    let mut pivots = reduce(
        &generators,
        &vec![Rat::zero(); e],
        &neg_w,
        Tracking {
            columns: None,
            row_inverse: Some(&mut q),
        },
    )?;
    if pivots.len() < e {
        return Err(Error::NotSurjective {
            rank: pivots.len(),
            target: e,
        });
    }
    pivots.sort_by_key(|p| p.row);
    let columns: Vec<Vec<FieldElem>> = pivots.iter().map(|p| q.column(p.row)).collect();
    let weights = pivots.iter().map(|p| -&p.value).collect();
    DiagNorm::new(Matrix::from_columns(&columns)?, weights)
}

/// Approximate `n` by a lattice norm within `d_∞ <= ε/2`.
///
/// When every weight already lies in the value group `(1/N)Z` the result is
/// exact; otherwise the field is ramified until `1/N' < ε` and each weight is
/// rounded to the nearest multiple of `1/N'` (ties round up), the rounded
/// value being absorbed into a power of `u` on the basis vector.
pub fn lattice_approximation(n: &DiagNorm, eps: &Rat) -> Result<DiagNorm> {
    if *eps <= Rat::zero() {
        return Err(Error::Invalid("epsilon must be positive".into()));
    }
    let ram = n.ramification();
    let exact = n
        .weights()
        .iter()
        .all(|w| (w * int(ram as i64)).is_integer());
    let m = if exact {
        1
    } else {
        // Smallest m with 1/(ram*m) < eps.
        let bound = floor(&(Rat::one() / (eps * int(ram as i64))));
        let m: u32 = (bound + 1u32)
            .try_into()
            .map_err(|_| Error::Invalid("epsilon too small".into()))?;
        m.max(1)
    };
    let new_ram = ram * m;
    let lifted = n.basis().lift_to(new_ram);
    let half = rat(1, 2);
    let mut basis = lifted.clone();
    for (i, w) in n.weights().iter().enumerate() {
        let k = floor(&(w * int(new_ram as i64) + &half));
        let k: i64 = k
            .try_into()
            .map_err(|_| Error::Invalid("weight too large".into()))?;
        let scale = FieldElem::monomial(Rat::one(), -k, new_ram);
        for r in 0..basis.rows() {
            basis[(r, i)] = &lifted[(r, i)] * &scale;
        }
    }
    DiagNorm::new(basis, vec![Rat::zero(); n.dim()])
}
