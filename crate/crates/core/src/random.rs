//! Seeded generators for tests, fixtures and the CLI.
//!
//! Everything takes an explicit `Rng` so runs are reproducible from a seed.

use rand::Rng;

use crate::norms::{DiagNorm, SpectralData};
use crate::rat::{int, rat, Rat};
use num_traits::Zero;

use crate::valuated_linalg::Matrix;
use crate::valued_field::{FieldElem, Poly};

fn small_int(rng: &mut impl Rng, bound: i64) -> Rat {
    int(rng.gen_range(-bound..=bound))
}

fn nonzero_int(rng: &mut impl Rng, bound: i64) -> Rat {
    let v = rng.gen_range(1..=bound);
    int(if rng.gen_bool(0.5) { v } else { -v })
}

fn random_poly(rng: &mut impl Rng, max_degree: usize) -> Poly {
    let deg = rng.gen_range(0..=max_degree);
    let mut coeffs: Vec<Rat> = (0..=deg).map(|_| small_int(rng, 3)).collect();
    coeffs[0] = nonzero_int(rng, 3);
    Poly::from_coeffs(coeffs)
}

/// A random element with `u`-order in `-3..=3`; with `allow_den` it is a
/// genuine rational function about a third of the time.
pub fn random_field_elem(rng: &mut impl Rng, ram: u32, allow_den: bool) -> FieldElem {
    let shift = rng.gen_range(-3..=3);
    random_elem_with_shift(rng, shift, ram, allow_den)
}

fn random_elem_with_shift(rng: &mut impl Rng, shift: i64, ram: u32, allow_den: bool) -> FieldElem {
    let num = random_poly(rng, 2);
    let den = if allow_den && rng.gen_bool(1.0 / 3.0) {
        let mut coeffs = vec![int(1)];
        coeffs.extend((0..rng.gen_range(1..=2)).map(|_| small_int(rng, 2)));
        Poly::from_coeffs(coeffs)
    } else {
        Poly::one()
    };
    FieldElem::from_parts(num, shift, den, ram).expect("denominator has constant term 1")
}

/// An element of the valuation ring; zero with probability `zero_prob`.
pub fn random_integral_elem(rng: &mut impl Rng, ram: u32, zero_prob: f64) -> FieldElem {
    if rng.gen_bool(zero_prob) {
        return FieldElem::zero_in(ram);
    }
    let shift = rng.gen_range(0..=2);
    random_elem_with_shift(rng, shift, ram, false)
}

/// Rationals with denominators in `1..=4` and absolute value at most `bound`.
pub fn random_rats(rng: &mut impl Rng, n: usize, bound: i64) -> Vec<Rat> {
    (0..n)
        .map(|_| {
            let q = rng.gen_range(1..=4);
            rat(rng.gen_range(-bound * q..=bound * q), q)
        })
        .collect()
}

/// Values in the value group `(1/ram)Z` with absolute value at most `bound`.
pub fn random_values(rng: &mut impl Rng, n: usize, bound: i64, ram: u32) -> Vec<Rat> {
    let r = ram as i64;
    (0..n)
        .map(|_| rat(rng.gen_range(-bound * r..=bound * r), r))
        .collect()
}

/// Random entries, about a quarter of them zero.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, ram: u32) -> Matrix {
    let data = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.gen_bool(0.25) {
                        FieldElem::zero_in(ram)
                    } else {
                        random_field_elem(rng, ram, false)
                    }
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(data).expect("rectangular")
}

/// A random matrix with nonzero determinant.
pub fn random_invertible(rng: &mut impl Rng, d: usize, ram: u32) -> Matrix {
    loop {
        let m = random_matrix(rng, d, d, ram);
        if nonzero_at_sample_point(&m) {
            return m;
        }
    }
}

/// Sufficient test for `det m != 0`: the determinant of the entries
/// evaluated at `u = 2/7` is nonzero.
fn nonzero_at_sample_point(m: &Matrix) -> bool {
    let point = rat(2, 7);
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut row = Vec::with_capacity(m.cols());
        for x in m.row(i) {
            let Some(v) = evaluate(x, &point) else {
                return false;
            };
            row.push(v);
        }
        rows.push(row);
    }
    let d = rows.len();
    for col in 0..d {
        let Some(p) = (col..d).find(|&r| !rows[r][col].is_zero()) else {
            return false;
        };
        rows.swap(col, p);
        for r in col + 1..d {
            let f = &rows[r][col] / &rows[col][col];
            for c in col..d {
                let x = &rows[col][c] * &f;
                rows[r][c] -= x;
            }
        }
    }
    true
}

fn evaluate(x: &FieldElem, point: &Rat) -> Option<Rat> {
    let Some(shift) = x.u_order() else {
        return Some(Rat::zero());
    };
    let den = x.denominator().eval(point);
    if den.is_zero() {
        return None;
    }
    let power = num_traits::pow(point.clone(), shift.unsigned_abs() as usize);
    let power = if shift < 0 { power.recip() } else { power };
    Some(x.numerator().0.eval(point) * power / den)
}

/// A random element of `GL_d(O)`: lower unitriangular times unit diagonal
/// times upper unitriangular, all entries integral, with rows permuted.
pub fn random_unimodular(rng: &mut impl Rng, d: usize, ram: u32) -> Matrix {
    let mut lower = Matrix::identity(d);
    let mut upper = Matrix::identity(d);
    for i in 0..d {
        for j in 0..i {
            lower[(i, j)] = random_integral_elem(rng, ram, 0.3);
            upper[(j, i)] = random_integral_elem(rng, ram, 0.3);
        }
        let unit = FieldElem::from_rat(nonzero_int(rng, 3));
        let tail = random_integral_elem(rng, ram, 0.5);
        let tail = if tail.val() > crate::rat::Val::Finite(int(0)) {
            tail
        } else {
            FieldElem::zero()
        };
        upper[(i, i)] = &unit + &tail;
    }
    let mut m = lower.mul(&upper).expect("square");
    for i in (1..d).rev() {
        let j = rng.gen_range(0..=i);
        m.swap_rows(i, j);
    }
    m
}

/// A random diagonalizable norm with weights in the value group of `ram`.
pub fn random_diag_norm(rng: &mut impl Rng, d: usize, ram: u32) -> DiagNorm {
    let weights = random_values(rng, d, 4, ram);
    if rng.gen_bool(0.2) {
        return DiagNorm::monomial(weights);
    }
    DiagNorm::new(random_invertible(rng, d, ram), weights).expect("invertible basis")
}

/// A pair of norms with a known joint diagonal basis, disguised so that
/// neither stored basis reveals it, together with the spectrum it must have.
///
/// With `D = diag(u^{N w_i})`, the basis `S D^{-1} U D` with weights `w`
/// defines the same norm as `S` with weights `w` for any `U` in `GL_d(O)`.
pub fn scrambled_pair(
    rng: &mut impl Rng,
    d: usize,
    ram: u32,
) -> (DiagNorm, DiagNorm, SpectralData) {
    let gs = random_invertible(rng, d, ram);
    let wa = random_values(rng, d, 4, ram);
    let wb = random_values(rng, d, 4, ram);
    let disguise = |rng: &mut _, w: &[Rat]| {
        let exps: Vec<i64> = w
            .iter()
            .map(|x| {
                (x * int(ram as i64))
                    .to_integer()
                    .try_into()
                    .expect("small")
            })
            .collect();
        let dmat = Matrix::diagonal(
            exps.iter()
                .map(|&k| FieldElem::monomial(int(1), k, ram))
                .collect(),
        );
        let dinv = Matrix::diagonal(
            exps.iter()
                .map(|&k| FieldElem::monomial(int(1), -k, ram))
                .collect(),
        );
        let u = random_unimodular(rng, d, ram);
        let basis = gs
            .mul(&dinv)
            .and_then(|m| m.mul(&u))
            .and_then(|m| m.mul(&dmat))
            .expect("square");
        DiagNorm::new(basis, w.to_vec()).expect("invertible basis")
    };
    let a = disguise(rng, &wa);
    let b = disguise(rng, &wb);
    let expected = SpectralData::new(wa.iter().zip(&wb).map(|(x, y)| x - y).collect());
    (a, b, expected)
}
