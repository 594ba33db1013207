//! Weighted determinantal divisors by exhaustive minors.
//!
//! Independent of the elimination engine: `s_1 + ... + s_k` is the minimum,
//! over all `k x k` minors `(I, J)`, of `ν(det T_IJ) + Σ_I r_i + Σ_J c_j`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::rat::{Rat, Val};
use crate::valued_field::{FieldElem, Poly};

use super::Matrix;

/// Largest dimension accepted by [`weighted_invariants_by_minors`].
pub const MAX_MINOR_DIM: usize = 8;

pub fn weighted_invariants_by_minors(
    t: &Matrix,
    row_shifts: &[Rat],
    col_shifts: &[Rat],
) -> Result<Vec<Rat>> {
    let d = t.rows();
    if !t.is_square() || d > MAX_MINOR_DIM {
        return Err(Error::Invalid(format!(
            "minor enumeration needs a square matrix of size <= {MAX_MINOR_DIM}"
        )));
    }
    if row_shifts.len() != d || col_shifts.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: row_shifts.len().min(col_shifts.len()),
        });
    }
    let t = clear_row_denominators(t);

    let mut level: HashMap<(u32, u32), FieldElem> = HashMap::new();
    for i in 0..d {
        for j in 0..d {
            level.insert((1 << i, 1 << j), t[(i, j)].clone());
        }
    }
    let mut divisors: Vec<Rat> = Vec::with_capacity(d);
    for k in 1..=d {
        if k > 1 {
            level = next_level(&t, &level, k);
        }
        let best = level
            .iter()
            .filter_map(|(&(rows, cols), det)| {
                let Val::Finite(v) = det.val() else {
                    return None;
                };
                Some(v + mask_sum(rows, row_shifts) + mask_sum(cols, col_shifts))
            })
            .min()
            .ok_or(Error::Singular {
                rank: k - 1,
                dim: d,
            })?;
        divisors.push(best);
    }
    let mut out = Vec::with_capacity(d);
    let mut prev = Rat::from_integer(0.into());
    for dk in divisors {
        out.push(&dk - &prev);
        prev = dk;
    }
    Ok(out)
}

/// Multiply each row by the lcm of its denominators. Every canonical
/// denominator has constant term one, so minor valuations are unchanged.
fn clear_row_denominators(t: &Matrix) -> Matrix {
    let mut out = t.lift_to(t.ramification());
    let ram = t.ramification();
    for i in 0..out.rows() {
        let mut l = Poly::one();
        for x in out.row(i) {
            let den = x.denominator();
            if !den.is_one() {
                let g = l.gcd(den);
                l = l.mul(&den.div_rem(&g).0);
            }
        }
        if l.is_one() {
            continue;
        }
        let factor = FieldElem::from_parts(l, 0, Poly::one(), ram).expect("nonzero");
        for j in 0..out.cols() {
            out[(i, j)] = &out[(i, j)] * &factor;
        }
    }
    out
}

fn next_level(
    t: &Matrix,
    prev: &HashMap<(u32, u32), FieldElem>,
    k: usize,
) -> HashMap<(u32, u32), FieldElem> {
    let d = t.rows();
    let subsets = subsets_of_size(d, k);
    let mut out = HashMap::with_capacity(subsets.len() * subsets.len());
    for &rows in &subsets {
        let top = rows.trailing_zeros() as usize;
        let rest = rows & !(1 << top);
        for &cols in &subsets {
            let mut det = FieldElem::zero();
            for (pos, j) in bits(cols).enumerate() {
                let a = &t[(top, j)];
                if a.is_zero() {
                    continue;
                }
                let Some(minor) = prev.get(&(rest, cols & !(1 << j))) else {
                    continue;
                };
                if minor.is_zero() {
                    continue;
                }
                let term = a * minor;
                det = if pos % 2 == 0 {
                    &det + &term
                } else {
                    &det - &term
                };
            }
            out.insert((rows, cols), det);
        }
    }
    out
}

fn subsets_of_size(d: usize, k: usize) -> Vec<u32> {
    (0u32..(1 << d))
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

fn mask_sum(mask: u32, shifts: &[Rat]) -> Rat {
    bits(mask).map(|i| &shifts[i]).sum()
}
