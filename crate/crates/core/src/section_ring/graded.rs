//! Evaluating graded norm specs degree by degree, with a shared cache.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::norms::{max_norm, quotient_norm, sym_power, DiagNorm};
use crate::random::random_integral_elem;
use crate::rat::{Rat, Val};

use super::{
    add_exponents, monomials, multiplication_surjection, GradedNormSpec, Section, Variant,
};

/// A graded norm: [`GradedNormSpec`] plus memoized degree pieces.
///
/// The cache is behind a lock, so one instance can serve several threads.
#[derive(Debug)]
pub struct GradedNorm {
    spec: GradedNormSpec,
    children: Vec<GradedNorm>,
    cache: RwLock<HashMap<u32, Arc<DiagNorm>>>,
}

impl GradedNorm {
    pub fn new(spec: GradedNormSpec) -> Result<Self> {
        spec.validate()?;
        let children = match &spec.variant {
            Variant::MonomialWeights { .. } | Variant::DegreeOneGenerated { .. } => Vec::new(),
            Variant::Truncated { parent, .. } | Variant::Scaled { parent, .. } => {
                vec![GradedNorm::new((**parent).clone())?]
            }
            Variant::MaxOf { a, b } => vec![
                GradedNorm::new((**a).clone())?,
                GradedNorm::new((**b).clone())?,
            ],
        };
        Ok(GradedNorm {
            spec,
            children,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn spec(&self) -> &GradedNormSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn defined_at(&self, m: u32) -> bool {
        m >= 1 && self.spec.defined_at(m)
    }

    /// The norm on `H^0(mL)`, in the coordinates of [`monomials`]`(n, m)`.
    pub fn norm_at(&self, m: u32) -> Result<Arc<DiagNorm>> {
        if m == 0 {
            return Err(Error::Invalid("graded norms start in degree 1".into()));
        }
        if let Some(k) = self.blocking_level(m) {
            return Err(Error::NotDivisible { degree: m, k });
        }
        if let Some(n) = self.cache.read().expect("cache lock").get(&m) {
            return Ok(n.clone());
        }
        let norm = Arc::new(self.compute(m)?);
        self.cache
            .write()
            .expect("cache lock")
            .insert(m, norm.clone());
        Ok(norm)
    }

    fn blocking_level(&self, m: u32) -> Option<u32> {
        match &self.spec.variant {
            Variant::Truncated { k, .. } if !m.is_multiple_of(*k) => Some(*k),
            Variant::Truncated { k, .. } => self.children[0].blocking_level(*k),
            _ => self.children.iter().find_map(|c| c.blocking_level(m)),
        }
    }

    fn compute(&self, m: u32) -> Result<DiagNorm> {
        let n = self.spec.n;
        match &self.spec.variant {
            Variant::MonomialWeights { rule } => Ok(DiagNorm::monomial(
                monomials(n, m)
                    .exponents
                    .iter()
                    .map(|a| rule.weight(m, a))
                    .collect(),
            )),
            Variant::DegreeOneGenerated { base } => match base.monomial_weights() {
                Some(w) => Ok(DiagNorm::monomial(generated_weights(n, 1, &w, m))),
                None => generated_norm(base, n, 1, m),
            },
            Variant::Truncated { k, .. } => {
                let parent = self.children[0].norm_at(*k)?;
                let r = m / k;
                if r == 1 {
                    return Ok((*parent).clone());
                }
                match parent.monomial_weights() {
                    Some(w) => Ok(DiagNorm::monomial(generated_weights(n, *k, &w, r))),
                    None => generated_norm(&parent, n, *k, r),
                }
            }
            Variant::Scaled { rule, .. } => Ok(self.children[0].norm_at(m)?.scale(&rule.at(m))),
            Variant::MaxOf { .. } => max_norm(
                &*self.children[0].norm_at(m)?,
                &*self.children[1].norm_at(m)?,
            ),
        }
    }

    /// Monomial weights in degree `m` when that piece is toric.
    pub fn monomial_weights_at(&self, m: u32) -> Result<Option<Vec<Rat>>> {
        Ok(self.norm_at(m)?.monomial_weights())
    }
}

/// The norm on `H^0(rkL)` generated by `base` on `H^0(kL)`: the quotient of
/// `Sym^r base` along the multiplication map.
pub fn generated_norm(base: &DiagNorm, n: usize, k: u32, r: u32) -> Result<DiagNorm> {
    if base.dim() != monomials(n, k).h0() {
        return Err(Error::DimensionMismatch {
            expected: monomials(n, k).h0(),
            got: base.dim(),
        });
    }
    quotient_norm(
        &sym_power(base, r as usize)?,
        &multiplication_surjection(n, k, r),
    )
}

/// Shortcut for [`generated_norm`] when the base is diagonal in monomials:
/// the weight of `z^α` is the best sum `w(β_1) + … + w(β_r)` over ways of
/// writing `α = β_1 + … + β_r` with every `β_i` of degree `k`.
pub fn generated_weights(n: usize, k: u32, wk: &[Rat], r: u32) -> Vec<Rat> {
    let source = monomials(n, k);
    let mut cur = wk.to_vec();
    for step in 1..r {
        let from = monomials(n, step * k);
        let to = monomials(n, (step + 1) * k);
        let mut next: Vec<Option<Rat>> = vec![None; to.h0()];
        for (a, wa) in from.exponents.iter().zip(&cur) {
            for (b, wb) in source.exponents.iter().zip(wk) {
                let slot = &mut next[to.index_of(&add_exponents(a, b)).expect("degree adds up")];
                let v = wa + wb;
                if slot.as_ref().is_none_or(|s| v > *s) {
                    *slot = Some(v);
                }
            }
        }
        cur = next
            .into_iter()
            .map(|v| v.expect("every monomial is a product"))
            .collect();
    }
    cur
}

#[derive(Debug, Clone)]
pub struct SubmultViolation {
    pub m: u32,
    pub n: u32,
    pub left: Section,
    pub right: Section,
    /// `ν_{m+n}(left·right)`.
    pub product: Val,
    /// `ν_m(left) + ν_n(right)`.
    pub bound: Rat,
}

#[derive(Debug, Clone)]
pub struct SubmultReport {
    pub products_checked: usize,
    pub violation: Option<SubmultViolation>,
}

impl SubmultReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Audit `ν_{m+n}(s·s') >= ν_m(s) + ν_n(s')` for all degrees with `m + n <= max_degree`:
/// on every product of diagonal basis vectors, and on `samples` random pairs
/// per degree pair. Stops at the first violation.
pub fn submultiplicativity_check(
    g: &GradedNorm,
    max_degree: u32,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<SubmultReport> {
    if max_degree < 2 {
        return Err(Error::Invalid(
            "submultiplicativity needs degrees up to at least 2".into(),
        ));
    }
    let n = g.n();
    let mut checked = 0;
    for m in 1..max_degree {
        for m2 in m..=max_degree - m {
            if !(g.defined_at(m) && g.defined_at(m2) && g.defined_at(m + m2)) {
                continue;
            }
            let (a, b, ab) = (g.norm_at(m)?, g.norm_at(m2)?, g.norm_at(m + m2)?);
            let (sa, sb, sab) = (monomials(n, m), monomials(n, m2), monomials(n, m + m2));
            let mut check =
                |s: Section, t: Section, bound: Rat| -> Result<Option<SubmultViolation>> {
                    checked += 1;
                    let product = ab.eval(&s.mul(&t).coords(&sab)?)?;
                    Ok(
                        (product < Val::Finite(bound.clone())).then_some(SubmultViolation {
                            m,
                            n: m2,
                            left: s,
                            right: t,
                            product,
                            bound,
                        }),
                    )
                };
            for i in 0..a.dim() {
                for j in 0..b.dim() {
                    let s = Section::from_coords(&sa, &a.basis_vector(i));
                    let t = Section::from_coords(&sb, &b.basis_vector(j));
                    let bound = &a.weights()[i] + &b.weights()[j];
                    if let Some(v) = check(s, t, bound)? {
                        return Ok(SubmultReport {
                            products_checked: checked,
                            violation: Some(v),
                        });
                    }
                }
            }
            for _ in 0..samples {
                let cs: Vec<_> = (0..sa.h0())
                    .map(|_| random_integral_elem(rng, 1, 0.3))
                    .collect();
                let ct: Vec<_> = (0..sb.h0())
                    .map(|_| random_integral_elem(rng, 1, 0.3))
                    .collect();
                let (Val::Finite(x), Val::Finite(y)) = (a.eval(&cs)?, b.eval(&ct)?) else {
                    continue;
                };
                if let Some(v) = check(
                    Section::from_coords(&sa, &cs),
                    Section::from_coords(&sb, &ct),
                    x + y,
                )? {
                    return Ok(SubmultReport {
                        products_checked: checked,
                        violation: Some(v),
                    });
                }
            }
        }
    }
    Ok(SubmultReport {
        products_checked: checked,
        violation: None,
    })
}
