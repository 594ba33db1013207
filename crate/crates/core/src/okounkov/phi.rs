//! The superadditive function `Φ(n, α)` of a graded norm and what is built from it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::norms::DiagNorm;
use crate::rat::{int, Rat};
use crate::section_ring::{add_exponents, monomials, Exponent, GradedNorm, SectionSpace};
use crate::valuated_linalg::{min_val_on_translate, Matrix};
use crate::valued_field::FieldElem;

use super::{MonomialOrder, OkSemigroup, Provenance};

fn unit(d: usize, i: usize) -> Vec<FieldElem> {
    (0..d)
        .map(|j| {
            if i == j {
                FieldElem::one()
            } else {
                FieldElem::zero()
            }
        })
        .collect()
}

/// `Φ` for one norm on `H^0(O(n))`: the quotient value of `z^α` modulo the
/// span of the monomials above `α`. Works for any diagonalizable norm.
pub fn phi_of_norm(
    norm: &DiagNorm,
    space: &SectionSpace,
    alpha: &[u32],
    order: &MonomialOrder,
) -> Result<Rat> {
    let idx = space
        .index_of(alpha)
        .ok_or_else(|| Error::Invalid(format!("{alpha:?} is not in Γ_{}", space.m)))?;
    let h0 = space.h0();
    let higher: Vec<Vec<FieldElem>> = space
        .exponents
        .iter()
        .enumerate()
        .filter(|(_, b)| order.cmp(b, alpha) == Ordering::Greater)
        .map(|(j, _)| unit(h0, j))
        .collect();
    let s = if higher.is_empty() {
        Matrix::zeros(h0, 0)
    } else {
        Matrix::from_columns(&higher)?
    };
    min_val_on_translate(&unit(h0, idx), &s, norm)
}

/// `Φ(n, α)` for the graded norm `g`; monomial-diagonal pieces are read off directly.
pub fn phi(g: &GradedNorm, n: u32, alpha: &[u32], order: &MonomialOrder) -> Result<Rat> {
    if n == 0 {
        return if alpha.iter().all(|&a| a == 0) {
            Ok(Rat::zero())
        } else {
            Err(Error::Invalid(format!("{alpha:?} is not in Γ_0")))
        };
    }
    let space = monomials(g.n(), n);
    let norm = g.norm_at(n)?;
    match norm.monomial_weights() {
        Some(w) => space
            .index_of(alpha)
            .map(|i| w[i].clone())
            .ok_or_else(|| Error::Invalid(format!("{alpha:?} is not in Γ_{n}"))),
        None => phi_of_norm(&norm, &space, alpha, order),
    }
}

/// `Φ(n, α)` for every level `n <= max_level` where `g` is defined, plus `Φ(0, 0) = 0`.
#[derive(Debug, Clone)]
pub struct PhiData {
    pub n_dim: usize,
    pub order: MonomialOrder,
    /// Per level, values in the order of [`monomials`]`(n_dim, n).exponents`.
    table: BTreeMap<u32, Vec<Rat>>,
}

/// A witness `Φ(m + n, α + β) < Φ(m, α) + Φ(n, β)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiViolation {
    pub m: u32,
    pub alpha: Exponent,
    pub n: u32,
    pub beta: Exponent,
    pub value: Rat,
    pub bound: Rat,
}

pub fn phi_table(g: &GradedNorm, max_level: u32, order: &MonomialOrder) -> Result<PhiData> {
    if order.d != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: order.d,
        });
    }
    let mut table = BTreeMap::new();
    table.insert(0, vec![Rat::zero()]);
    for n in (1..=max_level).filter(|&n| g.defined_at(n)) {
        let norm = g.norm_at(n)?;
        let row = match norm.monomial_weights() {
            Some(w) => w,
            None => {
                let space = monomials(g.n(), n);
                space
                    .exponents
                    .iter()
                    .map(|a| phi_of_norm(&norm, &space, a, order))
                    .collect::<Result<_>>()?
            }
        };
        table.insert(n, row);
    }
    Ok(PhiData {
        n_dim: g.n(),
        order: *order,
        table,
    })
}

impl PhiData {
    pub fn levels(&self) -> impl Iterator<Item = u32> + '_ {
        self.table.keys().copied()
    }

    pub fn has_level(&self, n: u32) -> bool {
        self.table.contains_key(&n)
    }

    /// `(α, Φ(n, α))` in lattice order.
    pub fn level(&self, n: u32) -> Option<impl Iterator<Item = (Exponent, &Rat)>> {
        let row = self.table.get(&n)?;
        Some(monomials_or_origin(self.n_dim, n).into_iter().zip(row))
    }

    pub fn get(&self, n: u32, alpha: &[u32]) -> Option<&Rat> {
        let row = self.table.get(&n)?;
        if n == 0 {
            return alpha.iter().all(|&a| a == 0).then(|| &row[0]);
        }
        monomials(self.n_dim, n).index_of(alpha).map(|i| &row[i])
    }

    /// Exact audit over every stored triple with `m + n <= max_total`.
    pub fn superadditivity_violation(&self, max_total: u32) -> Option<PhiViolation> {
        let levels: Vec<u32> = self.levels().filter(|&n| n >= 1).collect();
        for (i, &m) in levels.iter().enumerate() {
            for &n in &levels[i..] {
                if m + n > max_total || !self.has_level(m + n) {
                    continue;
                }
                let target = monomials(self.n_dim, m + n);
                let sums = &self.table[&(m + n)];
                for (a, pa) in self.level(m).expect("stored level") {
                    for (b, pb) in self.level(n).expect("stored level") {
                        let value = &sums[target
                            .index_of(&add_exponents(&a, &b))
                            .expect("degrees add")];
                        let bound = pa + pb;
                        if *value < bound {
                            return Some(PhiViolation {
                                m,
                                alpha: a,
                                n,
                                beta: b,
                                value: value.clone(),
                                bound,
                            });
                        }
                    }
                }
            }
        }
        None
    }

    /// `(α/n, Φ(n, α)/n)` over stored levels `1 <= n <= max_level`, keeping the
    /// highest value at each location.
    pub fn point_cloud(&self, max_level: u32) -> Vec<(Vec<Rat>, Rat)> {
        let mut best: BTreeMap<Vec<Rat>, Rat> = BTreeMap::new();
        for n in self.levels().filter(|&n| n >= 1 && n <= max_level) {
            let ni = int(n as i64);
            for (a, p) in self.level(n).expect("stored level") {
                let x: Vec<Rat> = a.iter().map(|&c| int(c as i64) / &ni).collect();
                let y = p / &ni;
                match best.get_mut(&x) {
                    Some(v) if *v >= y => {}
                    Some(v) => *v = y,
                    None => {
                        best.insert(x, y);
                    }
                }
            }
        }
        best.into_iter().collect()
    }

    /// Rows `n,a1,…,ad,phi,phi_over_n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for i in 1..=self.n_dim {
            out.push_str(&format!(",a{i}"));
        }
        out.push_str(",phi,phi_over_n\n");
        for n in self.levels() {
            for (a, p) in self.level(n).expect("stored level") {
                out.push_str(&n.to_string());
                for x in &a {
                    out.push_str(&format!(",{x}"));
                }
                let scaled = if n == 0 {
                    Rat::zero()
                } else {
                    p / int(n as i64)
                };
                out.push_str(&format!(",{p},{scaled}\n"));
            }
        }
        out
    }
}

fn monomials_or_origin(n_dim: usize, n: u32) -> Vec<Exponent> {
    if n == 0 {
        vec![vec![0; n_dim]]
    } else {
        monomials(n_dim, n).exponents
    }
}

/// The sequence `n ↦ sup_α Φ(n, α)/n` and its value at the last level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaEstimate {
    pub sequence: Vec<(u32, Rat)>,
    pub estimate: Rat,
}

pub fn theta(phi: &PhiData, max_level: u32) -> Result<ThetaEstimate> {
    let sequence: Vec<(u32, Rat)> = phi
        .levels()
        .filter(|&n| n >= 1 && n <= max_level)
        .map(|n| {
            let sup = phi.table[&n].iter().max().expect("slices are nonempty");
            (n, sup / int(n as i64))
        })
        .collect();
    let estimate = sequence
        .last()
        .map(|(_, v)| v.clone())
        .ok_or_else(|| Error::Invalid(format!("no stored level in 1..={max_level}")))?;
    Ok(ThetaEstimate { sequence, estimate })
}

/// `{α ∈ Γ_n : Φ(n, α) >= n t}`; `t = None` stands for `-∞`.
pub(crate) fn superlevel_slice(
    phi: &PhiData,
    t: Option<&Rat>,
    n: u32,
) -> Option<BTreeSet<Exponent>> {
    let ni = int(n as i64);
    Some(
        phi.level(n)?
            .filter(|(_, p)| t.is_none_or(|t| **p >= t * &ni))
            .map(|(a, _)| a)
            .collect(),
    )
}

/// Superlevel semigroup on the stored levels `n <= max_level`.
pub fn superlevel(phi: &PhiData, t: Option<&Rat>, max_level: u32) -> OkSemigroup {
    let mut slices = BTreeMap::new();
    slices.insert(0, [vec![0; phi.n_dim]].into_iter().collect());
    for n in phi.levels().filter(|&n| n >= 1 && n <= max_level) {
        slices.insert(n, superlevel_slice(phi, t, n).expect("stored level"));
    }
    OkSemigroup::from_slices(phi.n_dim, slices, Provenance::Superlevel { t: t.cloned() })
        .expect("level zero is the origin")
}

/// `μ(k)`: uniform probability on the points `Φ(k, α)/k`, `α ∈ Γ_k`.
pub fn mu_measure(phi: &PhiData, k: u32) -> Result<AtomicMeasure> {
    if k == 0 {
        return Err(Error::Invalid("μ(k) needs k >= 1".into()));
    }
    let row = phi
        .table
        .get(&k)
        .ok_or_else(|| Error::Invalid(format!("Φ is not tabulated at level {k}")))?;
    let ki = int(k as i64);
    Ok(AtomicMeasure::empirical(
        &row.iter().map(|p| p / &ki).collect::<Vec<_>>(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{degree_one_p1, floor_g_p1, identity_weights_p1};
    use crate::norms::vol;
    use crate::random::random_diag_norm;
    use crate::rat::rat;
    use crate::section_ring::{GradedNormSpec, ScaleRule, WeightRule};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table(spec: GradedNormSpec, max: u32) -> PhiData {
        let d = spec.n;
        phi_table(&GradedNorm::new(spec).unwrap(), max, &MonomialOrder::lex(d)).unwrap()
    }

    #[test]
    fn trivial_spec() {
        let p = table(GradedNormSpec::trivial(2), 6);
        for n in 0..=6 {
            assert!(p.level(n).unwrap().all(|(_, v)| v.is_zero()));
        }
        assert_eq!(theta(&p, 6).unwrap().estimate, int(0));
        assert_eq!(mu_measure(&p, 4).unwrap(), AtomicMeasure::dirac(int(0)));
        let full = superlevel(&p, Some(&int(0)), 6);
        assert_eq!(full.slice(5).unwrap().len(), 21);
        let empty = superlevel(&p, Some(&int(1)), 6);
        assert_eq!(empty.empty_levels(), (1..=6).collect::<Vec<_>>());
        assert_eq!(
            superlevel(&p, None, 6),
            OkSemigroup {
                provenance: Provenance::Superlevel { t: None },
                ..OkSemigroup::full_simplex(2, 6)
            }
        );
    }

    #[test]
    fn identity_weights() {
        let p = table(identity_weights_p1(), 12);
        let th = theta(&p, 12).unwrap();
        assert!(th.sequence.iter().all(|(_, v)| *v == int(1)));
        let mu = mu_measure(&p, 4).unwrap();
        assert_eq!(
            mu,
            AtomicMeasure::from_atoms((0..=4).map(|j| (rat(j, 4), rat(1, 5))))
        );
        assert!(phi(
            &GradedNorm::new(identity_weights_p1()).unwrap(),
            3,
            &[4],
            &MonomialOrder::lex(1)
        )
        .is_err());
    }

    #[test]
    fn general_path_matches_monomial_weights() {
        let g = GradedNorm::new(floor_g_p1()).unwrap();
        for order in [MonomialOrder::lex(1), MonomialOrder::grlex(1)] {
            for n in 1..=8 {
                let space = monomials(1, n);
                let norm = g.norm_at(n).unwrap();
                for a in &space.exponents {
                    assert_eq!(
                        phi_of_norm(&norm, &space, a, &order).unwrap(),
                        phi(&g, n, a, &order).unwrap()
                    );
                }
            }
        }
        let spec = GradedNormSpec::monomial(
            2,
            WeightRule::Affine {
                slopes: vec![int(2), rat(-1, 3)],
                constant: int(1),
            },
        );
        let g = GradedNorm::new(spec).unwrap();
        for order in [MonomialOrder::lex(2), MonomialOrder::grlex(2)] {
            let space = monomials(2, 3);
            let norm = g.norm_at(3).unwrap();
            for a in &space.exponents {
                assert_eq!(
                    phi_of_norm(&norm, &space, a, &order).unwrap(),
                    phi(&g, 3, a, &order).unwrap()
                );
            }
        }
    }

    #[test]
    fn superadditive_on_fixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let specs = vec![
            floor_g_p1(),
            identity_weights_p1(),
            degree_one_p1(int(0), rat(3, 2)),
            GradedNormSpec::degree_one(1, random_diag_norm(&mut rng, 2, 1)),
            GradedNormSpec::degree_one(2, random_diag_norm(&mut rng, 3, 1)),
            GradedNormSpec::truncated(floor_g_p1(), 2),
        ];
        for spec in specs {
            let d = spec.n;
            let max = if d == 1 { 10 } else { 6 };
            for order in [MonomialOrder::lex(d), MonomialOrder::grlex(d)] {
                let p = phi_table(&GradedNorm::new(spec.clone()).unwrap(), max, &order).unwrap();
                assert_eq!(p.superadditivity_violation(max), None);
            }
        }
    }

    #[test]
    fn audit_reports_witness() {
        // A weight table violating superadditivity at Φ(2, 1) < Φ(1, 0) + Φ(1, 1).
        let mut p = table(GradedNormSpec::trivial(1), 2);
        p.table.insert(1, vec![int(0), int(1)]);
        let v = p.superadditivity_violation(2).unwrap();
        assert_eq!((v.m, v.n, v.value, v.bound), (1, 1, int(0), int(1)));
    }

    #[test]
    fn mean_identity_with_volume() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..4 {
            let (a, b) = (
                random_diag_norm(&mut rng, 2, 1),
                random_diag_norm(&mut rng, 2, 1),
            );
            let (ga, gb) = (
                GradedNorm::new(GradedNormSpec::degree_one(1, a)).unwrap(),
                GradedNorm::new(GradedNormSpec::degree_one(1, b)).unwrap(),
            );
            let order = MonomialOrder::lex(1);
            let (pa, pb) = (
                phi_table(&ga, 4, &order).unwrap(),
                phi_table(&gb, 4, &order).unwrap(),
            );
            for k in 1..=4 {
                let lhs = mu_measure(&pa, k).unwrap().first_moment()
                    - mu_measure(&pb, k).unwrap().first_moment();
                let v = vol(&ga.norm_at(k).unwrap(), &gb.norm_at(k).unwrap()).unwrap();
                assert_eq!(lhs, v / int(k as i64));
            }
        }
    }

    #[test]
    fn scaling_shifts_theta() {
        let c = rat(2, 7);
        let base = table(floor_g_p1(), 12);
        let linear = table(
            GradedNormSpec::scaled(floor_g_p1(), ScaleRule::Linear { c: c.clone() }),
            12,
        );
        let constant = table(
            GradedNormSpec::scaled(floor_g_p1(), ScaleRule::Constant { c: c.clone() }),
            12,
        );
        for n in 1..=12 {
            for ((_, x), (_, y)) in base.level(n).unwrap().zip(constant.level(n).unwrap()) {
                assert_eq!(y - x, c);
            }
            let (tb, tl, tc) = (
                theta(&base, n).unwrap().estimate,
                theta(&linear, n).unwrap().estimate,
                theta(&constant, n).unwrap().estimate,
            );
            assert_eq!(&tl - &tb, c);
            assert_eq!(&tc - &tb, &c / int(n as i64));
        }
    }

    #[test]
    fn superlevels_nest() {
        let p = table(floor_g_p1(), 12);
        let ts = [
            rat(-1, 2),
            int(0),
            rat(1, 10),
            rat(1, 4),
            rat(2, 5),
            rat(1, 2),
        ];
        let sets: Vec<OkSemigroup> = ts.iter().map(|t| superlevel(&p, Some(t), 12)).collect();
        for w in sets.windows(2) {
            for n in 0..=12 {
                assert!(w[1].slice(n).unwrap().is_subset(w[0].slice(n).unwrap()));
            }
        }
        for s in &sets {
            assert_eq!(s.semigroup_violation(), None);
        }
    }
}
