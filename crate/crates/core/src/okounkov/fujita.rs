//! Volumes of truncated semigroups `Γ^k` against the full semigroup.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rat::{int, rat, serde_rat, Rat};
use crate::section_ring::lattice_points;

use super::{gamma_slice, OkSemigroup, Provenance};

/// `P^2` with the vertex `(1, 0)` removed from `Γ_1` and every other slice full.
pub fn corner_deleted_p2(max_level: u32) -> OkSemigroup {
    let mut slices: BTreeMap<u32, BTreeSet<Vec<u32>>> =
        (0..=max_level).map(|m| (m, gamma_slice(2, m))).collect();
    if let Some(g1) = slices.get_mut(&1) {
        g1.remove(&vec![1, 0]);
    }
    OkSemigroup::from_slices(
        2,
        slices,
        Provenance::Custom {
            name: "corner_deleted_p2".into(),
        },
    )
    .expect("level zero is the origin")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FujitaRow {
    pub k: u32,
    /// `Γ^k` is read at level `r = N / k`, which sits inside `Γ_N`.
    pub r: u32,
    pub count: usize,
    /// `k^{-d} |Γ^k_r| / r^d = |Γ^k_r| / N^d`.
    #[serde(with = "serde_rat")]
    pub estimate: Rat,
    /// Full estimate minus this one.
    #[serde(with = "serde_rat")]
    pub gap: Rat,
    /// `Γ^k_s ⊆ Γ_{ks}` for every `s <= r`.
    pub inclusion_holds: bool,
}

/// Lattice points of `n K` for the box `K = [1/(4d), 1/(2d)]^d` inside `Δ_d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompactSliceAudit {
    #[serde(with = "serde_rat")]
    pub box_lo: Rat,
    #[serde(with = "serde_rat")]
    pub box_hi: Rat,
    pub points_checked: usize,
    /// Smallest `n0` with `nK ∩ Z^d ⊆ Γ_n` for all stored `n0 <= n <= N`.
    pub holds_from: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FujitaReport {
    pub d: usize,
    pub level: u32,
    pub full_count: usize,
    #[serde(with = "serde_rat")]
    pub full_estimate: Rat,
    pub rows: Vec<FujitaRow>,
    pub compact_slice: CompactSliceAudit,
}

impl FujitaReport {
    pub fn estimates(&self) -> Vec<Rat> {
        self.rows.iter().map(|r| r.estimate.clone()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,r,count,estimate,full_estimate,gap,inclusion_holds\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.k, r.r, r.count, r.estimate, self.full_estimate, r.gap, r.inclusion_holds
            ));
        }
        out
    }
}

fn check_admissible(gamma: &OkSemigroup, level: u32) -> Result<()> {
    if level == 0 {
        return Err(Error::Invalid("the level N must be positive".into()));
    }
    if let Some(n) = (0..=level).find(|&n| gamma.slice(n).is_none()) {
        return Err(Error::Invalid(format!("slice Γ_{n} is missing")));
    }
    if let Some(n) = (1..=level).find(|&n| gamma.count(n) == 0) {
        return Err(Error::Invalid(format!("slice Γ_{n} is empty")));
    }
    if let Some(v) = gamma.semigroup_violation() {
        return Err(Error::Invalid(format!(
            "not a semigroup: {:?} in Γ_{} plus {:?} in Γ_{} leaves Γ_{}",
            v.alpha,
            v.m,
            v.beta,
            v.n,
            v.m + v.n
        )));
    }
    Ok(())
}

/// Rescaled lattice-count volumes of `Γ^k`, generated in degree one by `Γ_k`,
/// at the common level `N`, with the inclusion and compact-slice audits.
pub fn fujita_check(gamma: &OkSemigroup, ks: &[u32], level: u32) -> Result<FujitaReport> {
    check_admissible(gamma, level)?;
    let d = gamma.d;
    let full_count = gamma.count(level);
    let full_estimate = gamma.volume_estimate(level);
    let scale = int(level as i64).pow(d as i32);
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        if k == 0 || !level.is_multiple_of(k) {
            return Err(Error::NotDivisible { degree: level, k });
        }
        let r = level / k;
        let gk = gamma.generated_by(k, r)?;
        let inclusion_holds = (0..=r).all(|s| {
            gk.slice(s)
                .expect("generated level")
                .is_subset(gamma.slice(k * s).expect("admissible"))
        });
        let count = gk.count(r);
        let estimate = int(count as i64) / &scale;
        rows.push(FujitaRow {
            k,
            r,
            count,
            gap: &full_estimate - &estimate,
            estimate,
            inclusion_holds,
        });
    }
    Ok(FujitaReport {
        d,
        level,
        full_count,
        full_estimate,
        rows,
        compact_slice: compact_slice_audit(gamma, level),
    })
}

fn compact_slice_audit(gamma: &OkSemigroup, level: u32) -> CompactSliceAudit {
    let d = gamma.d as i64;
    let (lo, hi) = (rat(1, 4 * d), rat(1, 2 * d));
    let mut checked = 0;
    let mut holds_from = None;
    for n in (1..=level).rev() {
        let (a, b) = (&lo * int(n as i64), &hi * int(n as i64));
        let inside: Vec<Vec<u32>> = lattice_points(gamma.d, n)
            .into_iter()
            .filter(|p| p.iter().all(|&x| int(x as i64) >= a && int(x as i64) <= b))
            .collect();
        checked += inside.len();
        if inside.iter().all(|p| gamma.contains(n, p)) {
            holds_from = Some(n);
        } else {
            break;
        }
    }
    CompactSliceAudit {
        box_lo: lo,
        box_hi: hi,
        points_checked: checked,
        holds_from,
    }
}
