use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::rat::{int, mean, serde_rat_vec, Rat, Val};
use crate::valuated_linalg::{
    det_valuation, reduce, series_invariants, series_solve, solve_matrix, to_series_joint, Matrix,
    Tracking,
};

use super::DiagNorm;

/// Relative spectrum `λ_1 >= ... >= λ_d` of a pair of norms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralData {
    #[serde(with = "serde_rat_vec")]
    lambdas: Vec<Rat>,
}

impl SpectralData {
    /// Sorts the values in descending order.
    pub fn new(mut lambdas: Vec<Rat>) -> Self {
        lambdas.sort_by(|a, b| b.cmp(a));
        SpectralData { lambdas }
    }

    pub fn lambdas(&self) -> &[Rat] {
        &self.lambdas
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    /// Relative volume: the mean of the spectrum.
    pub fn vol(&self) -> Rat {
        mean(&self.lambdas)
    }

    pub fn d1(&self) -> Rat {
        self.dp_pow(1)
    }

    /// `d_p^p = mean |λ|^p`, exact for integer `p`.
    pub fn dp_pow(&self, p: u32) -> Rat {
        let powers: Vec<Rat> = self
            .lambdas
            .iter()
            .map(|l| num_traits::pow(l.abs(), p as usize))
            .collect();
        mean(&powers)
    }

    /// `d_p` as a float; only `p = 1` and `p = ∞` are rational in general.
    pub fn dp(&self, p: u32) -> f64 {
        self.dp_pow(p)
            .to_f64()
            .unwrap_or(f64::NAN)
            .powf(1.0 / p as f64)
    }

    /// `sup_v |log n'(v) - log n(v)| = max |λ_i|`.
    pub fn dinf(&self) -> Rat {
        self.lambdas
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// The relative spectral measure `d^{-1} Σ δ_{λ_i}`.
    pub fn measure(&self) -> AtomicMeasure {
        AtomicMeasure::empirical(&self.lambdas)
    }

    /// Spectrum divided by `m` (per-degree rescaling).
    pub fn rescaled(&self, m: u32) -> SpectralData {
        let m = int(m as i64);
        SpectralData::new(self.lambdas.iter().map(|l| l / &m).collect())
    }

    pub fn negated(&self) -> SpectralData {
        SpectralData::new(self.lambdas.iter().map(|l| -l).collect())
    }
}

/// A basis diagonalizing two norms at once, with each norm's values on it.
#[derive(Debug, Clone)]
pub struct JointBasis {
    pub basis: Matrix,
    pub nu_a: Vec<Rat>,
    pub nu_b: Vec<Rat>,
}

impl JointBasis {
    pub fn lambdas(&self) -> Vec<Rat> {
        self.nu_a
            .iter()
            .zip(&self.nu_b)
            .map(|(a, b)| a - b)
            .collect()
    }
}

fn check_same_space(a: &DiagNorm, b: &DiagNorm) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// Joint diagonalization; monomial-diagonal pairs take the direct route.
pub fn joint_diagonalization(a: &DiagNorm, b: &DiagNorm) -> Result<JointBasis> {
    check_same_space(a, b)?;
    if let (Some(wa), Some(wb)) = (a.monomial_weights(), b.monomial_weights()) {
        return Ok(JointBasis {
            basis: Matrix::identity(a.dim()),
            nu_a: wa,
            nu_b: wb,
        });
    }
    joint_diagonalization_by_elimination(a, b)
}

/// Always runs the valuated elimination on the transition matrix.
pub fn joint_diagonalization_by_elimination(a: &DiagNorm, b: &DiagNorm) -> Result<JointBasis> {
    check_same_space(a, b)?;
    // Columns of T are b's basis vectors in a's coordinates.
    let t = solve_matrix(a.basis(), b.basis())?;
    let neg_wb: Vec<Rat> = b.weights().iter().map(|w| -w).collect();
    let mut tracked = b.basis().clone();
    let pivots = reduce(
        &t,
        a.weights(),
        &neg_wb,
        Tracking {
            columns: Some(&mut tracked),
            row_inverse: None,
        },
    )?;
    if pivots.len() < a.dim() {
        return Err(Error::Singular {
            rank: pivots.len(),
            dim: a.dim(),
        });
    }
    let mut columns = Vec::with_capacity(a.dim());
    let mut nu_a = Vec::with_capacity(a.dim());
    let mut nu_b = Vec::with_capacity(a.dim());
    for p in pivots {
        let wb = &b.weights()[p.col];
        columns.push(tracked.column(p.col));
        nu_a.push(&p.value + wb);
        nu_b.push(wb.clone());
    }
    Ok(JointBasis {
        basis: Matrix::from_columns(&columns)?,
        nu_a,
        nu_b,
    })
}

/// `λ_i = log b(s_i) - log a(s_i) = ν_a(s_i) - ν_b(s_i)` on a joint basis.
///
/// Sign convention: `relative_spectrum(a, a.scale(c))` is `(-c, ..., -c)`.
///
/// The spectrum is the list of pivot values of the weighted elimination of
/// the transition matrix, computed on certified truncated expansions.
pub fn relative_spectrum(a: &DiagNorm, b: &DiagNorm) -> Result<SpectralData> {
    check_same_space(a, b)?;
    if let (Some(wa), Some(wb)) = (a.monomial_weights(), b.monomial_weights()) {
        return Ok(SpectralData::new(
            wa.iter().zip(&wb).map(|(x, y)| x - y).collect(),
        ));
    }
    let ram = a.ramification().lcm(&b.ramification());
    let neg_wb: Vec<Rat> = b.weights().iter().map(|w| -w).collect();
    let values = series_invariants(
        |rel| {
            let mut ab = to_series_joint(&[a.basis(), b.basis()], ram, rel);
            let sb = ab.pop()?;
            series_solve(ab.pop()?, sb)
        },
        ram,
        a.weights(),
        &neg_wb,
    );
    match values {
        Some(v) if v.len() == a.dim() => Ok(SpectralData::new(v)),
        Some(v) => Err(Error::Singular {
            rank: v.len(),
            dim: a.dim(),
        }),
        None => relative_spectrum_by_elimination(a, b),
    }
}

pub fn relative_spectrum_by_elimination(a: &DiagNorm, b: &DiagNorm) -> Result<SpectralData> {
    Ok(SpectralData::new(
        joint_diagonalization_by_elimination(a, b)?.lambdas(),
    ))
}

pub fn vol(a: &DiagNorm, b: &DiagNorm) -> Result<Rat> {
    Ok(relative_spectrum(a, b)?.vol())
}

pub fn d1(a: &DiagNorm, b: &DiagNorm) -> Result<Rat> {
    Ok(relative_spectrum(a, b)?.d1())
}

pub fn dp_pow(a: &DiagNorm, b: &DiagNorm, p: u32) -> Result<Rat> {
    Ok(relative_spectrum(a, b)?.dp_pow(p))
}

pub fn dinf(a: &DiagNorm, b: &DiagNorm) -> Result<Rat> {
    Ok(relative_spectrum(a, b)?.dinf())
}

/// Relative volume from top exterior powers of the standard basis:
/// `d^{-1} [ν_{∧^d a}(e_1∧…∧e_d) - ν_{∧^d b}(e_1∧…∧e_d)]`.
pub fn vol_by_determinant(a: &DiagNorm, b: &DiagNorm) -> Result<Rat> {
    check_same_space(a, b)?;
    let d = a.dim();
    Ok((top_wedge_value(a)? - top_wedge_value(b)?) / int(d as i64))
}

/// `ν` of `e_1∧…∧e_d` for the top exterior power of `n`: the wedge of the
/// basis has weight `Σ w_i` and equals `det(basis)` times `e_1∧…∧e_d`.
pub fn top_wedge_value(n: &DiagNorm) -> Result<Rat> {
    let sum: Rat = n.weights().iter().sum();
    match det_valuation(n.basis())? {
        Val::Finite(v) => Ok(sum - v),
        Val::Infinity => Err(Error::Singular {
            rank: 0,
            dim: n.dim(),
        }),
    }
}

/// Pointwise maximum of two norms: weights `min(ν_a, ν_b)` on a joint basis.
pub fn max_norm(a: &DiagNorm, b: &DiagNorm) -> Result<DiagNorm> {
    let jb = joint_diagonalization(a, b)?;
    let weights = jb
        .nu_a
        .iter()
        .zip(&jb.nu_b)
        .map(|(x, y)| x.min(y).clone())
        .collect();
    DiagNorm::new(jb.basis, weights)
}
