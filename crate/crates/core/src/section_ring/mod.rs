//! The section ring of `O(1)` on `P^n`: monomial bases, products of
//! sections, the multiplication maps, and graded norms built on them.
//!
//! Sections are dehomogenized: a section of `O(m)` is a polynomial in
//! `z_1..z_n` of total degree at most `m`.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::norms::multisets;
use crate::valuated_linalg::Matrix;
use crate::valued_field::FieldElem;

mod graded;
mod spec;

pub use graded::{
    generated_norm, generated_weights, submultiplicativity_check, GradedNorm, SubmultReport,
    SubmultViolation,
};
pub use spec::{AffinePiece, GradedNormSpec, ScaleRule, TableEntry, Variant, WeightRule};

/// An exponent vector `α ∈ N^n`.
pub type Exponent = Vec<u32>;

/// `H^0(P^n, O(m))` with its monomial basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionSpace {
    pub n: usize,
    pub m: u32,
    /// Lattice points of `m Δ_n`, sorted lexicographically.
    pub exponents: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
}

impl SectionSpace {
    pub fn h0(&self) -> usize {
        self.exponents.len()
    }

    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    pub fn contains(&self, alpha: &[u32]) -> bool {
        self.index.contains_key(alpha)
    }
}

/// Exponents `α ∈ N^n` with `|α| <= m`, in lex order.
pub fn lattice_points(n: usize, m: u32) -> Vec<Exponent> {
    fn go(left: u32, slots: usize, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if slots == 0 {
            out.push(cur.clone());
            return;
        }
        for a in 0..=left {
            cur.push(a);
            go(left - a, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, n, &mut Vec::with_capacity(n), &mut out);
    out
}

pub fn monomials(n: usize, m: u32) -> SectionSpace {
    assert!(n >= 1, "projective dimension must be positive");
    let exponents = lattice_points(n, m);
    let index = exponents
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect();
    SectionSpace {
        n,
        m,
        exponents,
        index,
    }
}

/// `C(m + n, n)`.
pub fn h0(n: usize, m: u32) -> usize {
    let mut c: u128 = 1;
    for i in 1..=n as u128 {
        c = c * (m as u128 + i) / i;
    }
    c as usize
}

pub fn add_exponents(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// A polynomial section, stored sparsely by exponent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    terms: BTreeMap<Exponent, FieldElem>,
}

impl Section {
    pub fn monomial(alpha: Exponent) -> Self {
        Section {
            terms: BTreeMap::from([(alpha, FieldElem::one())]),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent, FieldElem)>) -> Self {
        let mut s = Section::default();
        for (alpha, c) in terms {
            s.add_term(alpha, &c);
        }
        s
    }

    /// The section with the given coordinates in the monomial basis of `space`.
    pub fn from_coords(space: &SectionSpace, coords: &[FieldElem]) -> Self {
        Section::from_terms(space.exponents.iter().cloned().zip(coords.iter().cloned()))
    }

    fn add_term(&mut self, alpha: Exponent, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(x) => {
                *x = &*x + c;
                if x.is_zero() {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &FieldElem)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|α|` among the terms.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Section) -> Section {
        let mut out = Section::default();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(add_exponents(a, b), &(x * y));
            }
        }
        out
    }

    /// Coordinates in the monomial basis of `space`.
    pub fn coords(&self, space: &SectionSpace) -> Result<Vec<FieldElem>> {
        let mut out = vec![FieldElem::zero(); space.h0()];
        for (alpha, c) in &self.terms {
            let i = space.index_of(alpha).ok_or_else(|| {
                Error::Invalid(format!(
                    "exponent {alpha:?} is not a section of degree {}",
                    space.m
                ))
            })?;
            out[i] = c.clone();
        }
        Ok(out)
    }
}

/// The multiplication map `Sym^r H^0(kL) -> H^0(rkL)`.
///
/// Columns are indexed by [`multisets`]`(h0(kL), r)` over the monomial basis
/// of degree `k`, matching the coordinates of [`crate::norms::sym_power`].
pub fn multiplication_surjection(n: usize, k: u32, r: u32) -> Matrix {
    assert!(k >= 1 && r >= 1, "degrees must be positive");
    let source = monomials(n, k);
    let target = monomials(n, k * r);
    let cols = multisets(source.h0(), r as usize);
    let mut a = Matrix::zeros(target.h0(), cols.len());
    for (c, multiset) in cols.iter().enumerate() {
        let mut alpha = vec![0; n];
        for &i in multiset {
            alpha = add_exponents(&alpha, &source.exponents[i]);
        }
        let row = target
            .index_of(&alpha)
            .expect("sum of sections has the right degree");
        a[(row, c)] = FieldElem::one();
    }
    a
}

/// `Sym^m H^0(L) -> H^0(mL)`; an isomorphism on `P^n`.
pub fn sym_surjection(n: usize, m: u32) -> Matrix {
    multiplication_surjection(n, 1, m)
}
