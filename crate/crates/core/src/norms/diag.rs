use std::sync::OnceLock;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rat::{Rat, Val};
use crate::valuated_linalg::{det_valuation, inverse, rank, Matrix};
use crate::valued_field::FieldElem;

/// A diagonalizable norm `ν(Σ a_i b_i) = min_i (ν(a_i) + w_i)`.
///
/// Columns of `basis` are the diagonalizing vectors `b_i` in ambient
/// coordinates and `w_i = -log‖b_i‖` is stored in valuation units. With the
/// basis fixed, varying the weights traces out the apartment of that basis.
#[derive(Clone)]
pub struct DiagNorm {
    basis: Matrix,
    weights: Vec<Rat>,
    inverse: OnceLock<Matrix>,
}

impl DiagNorm {
    /// Fails unless `basis` is square and invertible.
    pub fn new(basis: Matrix, weights: Vec<Rat>) -> Result<Self> {
        let norm = Self::from_parts(basis, weights)?;
        if det_valuation(&norm.basis)?.is_infinite() {
            return Err(Error::Singular {
                rank: rank(&norm.basis),
                dim: norm.dim(),
            });
        }
        Ok(norm)
    }

    /// Shape checks only; invertibility is verified on first use.
    pub(crate) fn from_parts(basis: Matrix, weights: Vec<Rat>) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::Invalid(format!(
                "basis must be square, got {}x{}",
                basis.rows(),
                basis.cols()
            )));
        }
        if basis.rows() == 0 {
            return Err(Error::Invalid(
                "zero-dimensional spaces are not supported".into(),
            ));
        }
        if weights.len() != basis.cols() {
            return Err(Error::DimensionMismatch {
                expected: basis.cols(),
                got: weights.len(),
            });
        }
        Ok(DiagNorm {
            basis,
            weights,
            inverse: OnceLock::new(),
        })
    }

    /// The trivial lattice norm: standard basis, all weights zero.
    pub fn trivial(d: usize) -> Self {
        Self::monomial(vec![Rat::zero(); d])
    }

    /// Diagonal in the standard (monomial) basis with the given weights.
    pub fn monomial(weights: Vec<Rat>) -> Self {
        let d = weights.len();
        let norm = DiagNorm {
            basis: Matrix::identity(d),
            weights,
            inverse: OnceLock::new(),
        };
        let _ = norm.inverse.set(Matrix::identity(d));
        norm
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn basis_vector(&self, i: usize) -> Vec<FieldElem> {
        self.basis.column(i)
    }

    pub fn ramification(&self) -> u32 {
        self.basis.ramification()
    }

    /// A lattice norm has every weight zero.
    pub fn is_lattice(&self) -> bool {
        self.weights.iter().all(Zero::is_zero)
    }

    pub(crate) fn inverse_basis(&self) -> Result<&Matrix> {
        if let Some(inv) = self.inverse.get() {
            return Ok(inv);
        }
        let inv = if self.basis.is_diagonal() {
            diagonal_inverse(&self.basis)?
        } else {
            inverse(&self.basis)?
        };
        Ok(self.inverse.get_or_init(|| inv))
    }

    /// Coordinates of `v` in the diagonalizing basis.
    pub fn coords(&self, v: &[FieldElem]) -> Result<Vec<FieldElem>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        self.inverse_basis()?.mul_vec(v)
    }

    /// `ν_n(v) = -log n(v)`; `+∞` exactly at `v = 0`.
    pub fn eval(&self, v: &[FieldElem]) -> Result<Val> {
        let x = self.coords(v)?;
        Ok(x.iter()
            .zip(&self.weights)
            .map(|(a, w)| a.val().shifted(w))
            .min()
            .unwrap_or(Val::Infinity))
    }

    /// Weights with respect to the standard basis when the norm is diagonal
    /// there, i.e. the basis matrix is diagonal.
    pub fn monomial_weights(&self) -> Option<Vec<Rat>> {
        if !self.basis.is_diagonal() {
            return None;
        }
        Some(
            self.weights
                .iter()
                .enumerate()
                .map(|(i, w)| w - self.basis[(i, i)].val_finite())
                .collect(),
        )
    }

    pub fn is_monomial_diagonal(&self) -> bool {
        self.basis.is_diagonal()
    }

    /// Multiply the norm by `e^{-c}`: every weight increases by `c`.
    pub fn scale(&self, c: &Rat) -> DiagNorm {
        DiagNorm {
            basis: self.basis.clone(),
            weights: self.weights.iter().map(|w| w + c).collect(),
            inverse: self.inverse.clone(),
        }
    }

    /// Same basis and weights over `K(t^(1/(N*m)))`.
    pub fn ground_field_extension(&self, m: u32) -> DiagNorm {
        if m == 1 {
            return self.clone();
        }
        let inverse = OnceLock::new();
        if let Some(inv) = self.inverse.get() {
            let _ = inverse.set(inv.ramify(m));
        }
        DiagNorm {
            basis: self.basis.ramify(m),
            weights: self.weights.clone(),
            inverse,
        }
    }

    /// Pointwise equality of the two norms (same unit balls for every weight shift).
    pub fn same_norm(&self, other: &DiagNorm) -> Result<bool> {
        let sp = super::relative_spectrum(self, other)?;
        Ok(sp.lambdas().iter().all(Zero::is_zero))
    }
}

impl std::fmt::Debug for DiagNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let w: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(
            f,
            "DiagNorm(weights=[{}], basis={:?})",
            w.join(", "),
            self.basis
        )
    }
}

fn diagonal_inverse(basis: &Matrix) -> Result<Matrix> {
    let entries = (0..basis.rows())
        .map(|i| {
            basis[(i, i)].inv().map_err(|_| Error::Singular {
                rank: i,
                dim: basis.rows(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::diagonal(entries))
}
