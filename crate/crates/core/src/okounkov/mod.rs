//! Okounkov semigroups of `P^n` at the torus-fixed point, the superadditive
//! function `Φ`, Chebyshev envelopes and the measures `μ(k)`.
//!
//! Sections are polynomials in the affine coordinates `z_1, …, z_n`, so the
//! valuation attached to a monomial order is the order-minimal exponent.

mod chebyshev;
mod fujita;
mod lp;
mod phi;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{int, serde_rat_opt, Rat};
use crate::section_ring::{add_exponents, lattice_points, Exponent, Section};

pub use chebyshev::{
    chebyshev_transform, equidistribution_check, pushforward_cdf, simplex_grid, upper_hull,
    Envelope1d, EquidistributionReport, EquidistributionRow,
};
pub use fujita::{corner_deleted_p2, fujita_check, CompactSliceAudit, FujitaReport, FujitaRow};
pub use phi::{
    mu_measure, phi, phi_table, superlevel, theta, PhiData, PhiViolation, ThetaEstimate,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    /// Compare the first coordinate, then the second, and so on.
    Lex,
    /// Total degree first, ties broken lexicographically.
    Grlex,
}

/// A monomial order on `N^d`; both kinds are compatible with addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub d: usize,
}

impl MonomialOrder {
    pub fn lex(d: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            d,
        }
    }

    pub fn grlex(d: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::Grlex,
            d,
        }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        debug_assert_eq!(a.len(), self.d);
        debug_assert_eq!(b.len(), self.d);
        match self.kind {
            OrderKind::Lex => a.cmp(b),
            OrderKind::Grlex => {
                let (da, db): (u64, u64) = (
                    a.iter().map(|&x| x as u64).sum(),
                    b.iter().map(|&x| x as u64).sum(),
                );
                da.cmp(&db).then_with(|| a.cmp(b))
            }
        }
    }
}

/// The order-minimal exponent carrying a nonzero coefficient.
pub fn ord_val(f: &Section, order: &MonomialOrder) -> Result<Exponent> {
    f.terms()
        .map(|(a, _)| a)
        .min_by(|a, b| order.cmp(a, b))
        .cloned()
        .ok_or_else(|| Error::Invalid("the zero section has no order of vanishing".into()))
}

/// `Γ_m` for `O(1)` on `P^n`: every monomial is a section, so all lattice points of `m Δ_n`.
pub fn gamma_slice(n_dim: usize, m: u32) -> BTreeSet<Exponent> {
    lattice_points(n_dim, m).into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    FullSimplex,
    /// `{α : Φ(n, α) >= n t}`; `t = None` is the `-∞` sentinel.
    Superlevel {
        #[serde(with = "serde_rat_opt")]
        t: Option<Rat>,
    },
    /// Generated in degree one by `Γ_k`, indexed by `r` with `Γ^k_r ⊆ Γ_{rk}`.
    Generated {
        k: u32,
    },
    Custom {
        name: String,
    },
}

/// Finitely many slices `Γ_n ⊂ N^d` of a graded semigroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OkSemigroup {
    pub d: usize,
    slices: BTreeMap<u32, BTreeSet<Exponent>>,
    pub provenance: Provenance,
}

/// `α ∈ Γ_m`, `β ∈ Γ_n` with `α + β ∉ Γ_{m+n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupViolation {
    pub m: u32,
    pub alpha: Exponent,
    pub n: u32,
    pub beta: Exponent,
}

impl OkSemigroup {
    /// Slices `0..=max_level` of the simplex semigroup of `P^d`.
    pub fn full_simplex(d: usize, max_level: u32) -> Self {
        OkSemigroup {
            d,
            slices: (0..=max_level).map(|m| (m, gamma_slice(d, m))).collect(),
            provenance: Provenance::FullSimplex,
        }
    }

    /// Requires `Γ_0 = {0}` and exponents of length `d`.
    pub fn from_slices(
        d: usize,
        slices: BTreeMap<u32, BTreeSet<Exponent>>,
        provenance: Provenance,
    ) -> Result<Self> {
        match slices.get(&0) {
            Some(g0) if g0.len() == 1 && g0.contains(&vec![0; d]) => {}
            _ => return Err(Error::Invalid("a semigroup needs Γ_0 = {0}".into())),
        }
        if let Some(a) = slices.values().flatten().find(|a| a.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.len(),
            });
        }
        Ok(OkSemigroup {
            d,
            slices,
            provenance,
        })
    }

    pub fn slice(&self, n: u32) -> Option<&BTreeSet<Exponent>> {
        self.slices.get(&n)
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> + '_ {
        self.slices.keys().copied()
    }

    pub fn max_level(&self) -> u32 {
        self.slices.keys().next_back().copied().unwrap_or(0)
    }

    /// `|Γ_n|`, zero when the slice is not stored.
    pub fn count(&self, n: u32) -> usize {
        self.slices.get(&n).map_or(0, |s| s.len())
    }

    pub fn contains(&self, n: u32, alpha: &[u32]) -> bool {
        self.slices.get(&n).is_some_and(|s| s.contains(alpha))
    }

    /// Levels `n >= 1` whose slice is empty.
    pub fn empty_levels(&self) -> Vec<u32> {
        self.slices
            .iter()
            .filter(|(n, s)| **n > 0 && s.is_empty())
            .map(|(n, _)| *n)
            .collect()
    }

    /// `Γ_m + Γ_n ⊆ Γ_{m+n}` over every stored triple of levels.
    pub fn semigroup_violation(&self) -> Option<SemigroupViolation> {
        for (&m, gm) in &self.slices {
            for (&n, gn) in self.slices.range(m..) {
                let Some(target) = self.slices.get(&(m + n)) else {
                    continue;
                };
                for a in gm {
                    for b in gn {
                        if !target.contains(&add_exponents(a, b)) {
                            return Some(SemigroupViolation {
                                m,
                                alpha: a.clone(),
                                n,
                                beta: b.clone(),
                            });
                        }
                    }
                }
            }
        }
        None
    }

    /// `max |α| / n` over stored levels `n >= 1`: the linear growth constant.
    pub fn growth_constant(&self) -> Rat {
        self.slices
            .iter()
            .filter(|(n, _)| **n > 0)
            .flat_map(|(n, s)| {
                s.iter()
                    .map(move |a| int(a.iter().map(|&x| x as i64).sum()) / int(*n as i64))
            })
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// `Γ^k_r = Γ_k + … + Γ_k` (`r` summands) for `r <= max_r`, stored at level `r`.
    pub fn generated_by(&self, k: u32, max_r: u32) -> Result<OkSemigroup> {
        let base = self
            .slices
            .get(&k)
            .ok_or_else(|| Error::Invalid(format!("slice Γ_{k} is not stored")))?;
        let mut slices = BTreeMap::new();
        let mut cur: BTreeSet<Exponent> = [vec![0; self.d]].into_iter().collect();
        slices.insert(0, cur.clone());
        for r in 1..=max_r {
            cur = cur
                .iter()
                .flat_map(|a| base.iter().map(move |b| add_exponents(a, b)))
                .collect();
            slices.insert(r, cur.clone());
        }
        Ok(OkSemigroup {
            d: self.d,
            slices,
            provenance: Provenance::Generated { k },
        })
    }

    /// Lattice-count estimate `|Γ_n| / n^d` of the Okounkov body volume.
    pub fn volume_estimate(&self, n: u32) -> Rat {
        assert!(n > 0, "volume estimates start at level 1");
        int(self.count(n) as i64) / int(n as i64).pow(self.d as i32)
    }

    /// Slices as `(n, α)` rows in level order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for i in 1..=self.d {
            out.push_str(&format!(",a{i}"));
        }
        out.push('\n');
        for (n, s) in &self.slices {
            for a in s {
                out.push_str(&n.to_string());
                for x in a {
                    out.push_str(&format!(",{x}"));
                }
                out.push('\n');
            }
        }
        out
    }
}
