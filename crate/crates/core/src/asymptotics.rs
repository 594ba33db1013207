//! Rescaled spectral data of pairs of graded norms along a list of degrees.
//!
//! Values at finite degree are exact. Limits are reported as the last value
//! together with the gap to the previous degree, not as claimed limits.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{relative_spectrum, SpectralData};
use crate::rat::{int, serde_rat, Rat};
use crate::section_ring::{GradedNorm, GradedNormSpec};

/// Degrees at the end of the list used to judge monotone decay.
pub const TAIL_WINDOW: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct DegreeRow {
    pub m: u32,
    /// `vol(norm_m, norm'_m) / m`.
    #[serde(with = "serde_rat")]
    pub vol: Rat,
    #[serde(with = "serde_rat")]
    pub d1: Rat,
    #[serde(with = "serde_rat")]
    pub dinf: Rat,
    /// `max |λ| / m`, the support bound of the rescaled measure.
    #[serde(with = "serde_rat")]
    pub support: Rat,
    /// The spectrum divided by `m`.
    pub spectrum: SpectralData,
}

/// The last value of a sequence and its distance to the one before.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tail {
    #[serde(with = "serde_rat")]
    pub last: Rat,
    #[serde(with = "crate::rat::serde_rat_opt")]
    pub gap: Option<Rat>,
}

impl Tail {
    fn of(values: &[Rat]) -> Tail {
        let last = values.last().cloned().unwrap_or_else(Rat::zero);
        let gap = (values.len() >= 2)
            .then(|| (&values[values.len() - 1] - &values[values.len() - 2]).abs());
        Tail { last, gap }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub degrees: Vec<u32>,
    pub rows: Vec<DegreeRow>,
    pub vol: Tail,
    pub d1: Tail,
    pub dinf: Tail,
    /// Sup of `dinf_m / m` over the computed degrees: a lower bound for the
    /// asymptotic `d_∞`.
    #[serde(with = "serde_rat")]
    pub dinf_sup: Rat,
}

impl AsymptoticReport {
    pub fn vols(&self) -> Vec<Rat> {
        self.rows.iter().map(|r| r.vol.clone()).collect()
    }

    pub fn d1s(&self) -> Vec<Rat> {
        self.rows.iter().map(|r| r.d1.clone()).collect()
    }

    pub fn dinfs(&self) -> Vec<Rat> {
        self.rows.iter().map(|r| r.dinf.clone()).collect()
    }

    /// Richardson extrapolation of `vol_m / m` assuming an error of order
    /// `1/m`, from the last two degrees. Informational only.
    pub fn extrapolated_vol(&self) -> Option<Rat> {
        let [.., a, b] = &self.rows[..] else {
            return None;
        };
        let (ma, mb) = (int(a.m as i64), int(b.m as i64));
        Some((&b.vol * &mb - &a.vol * &ma) / (mb - ma))
    }

    /// Columns `m,vol,d1,dinf,support`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,vol,d1,dinf,support\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{}", r.m, r.vol, r.d1, r.dinf, r.support)
                .expect("string write");
        }
        out
    }

    /// One JSON object per degree, including the rescaled spectrum.
    pub fn to_jsonl(&self) -> String {
        self.rows
            .iter()
            .map(|r| serde_json::to_string(r).expect("row serializes") + "\n")
            .collect()
    }
}

fn check_degrees(degrees: &[u32]) -> Result<()> {
    if degrees.is_empty() {
        return Err(Error::Invalid("no degrees requested".into()));
    }
    if degrees[0] == 0 || degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid(
            "degrees must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Per-degree spectra of `(a_m, b_m)` rescaled by `1/m`.
pub fn spectral_sequence(
    a: &GradedNorm,
    b: &GradedNorm,
    degrees: &[u32],
) -> Result<AsymptoticReport> {
    check_degrees(degrees)?;
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let mut rows = Vec::with_capacity(degrees.len());
    for &m in degrees {
        let sp = relative_spectrum(&*a.norm_at(m)?, &*b.norm_at(m)?)?.rescaled(m);
        rows.push(DegreeRow {
            m,
            vol: sp.vol(),
            d1: sp.d1(),
            dinf: sp.dinf(),
            support: sp.measure().support_bound(),
            spectrum: sp,
        });
    }
    let col = |f: fn(&DegreeRow) -> &Rat| rows.iter().map(f).cloned().collect::<Vec<_>>();
    let (vols, d1s, dinfs) = (col(|r| &r.vol), col(|r| &r.d1), col(|r| &r.dinf));
    Ok(AsymptoticReport {
        degrees: degrees.to_vec(),
        vol: Tail::of(&vols),
        d1: Tail::of(&d1s),
        dinf: Tail::of(&dinfs),
        dinf_sup: dinfs.iter().max().cloned().unwrap_or_else(Rat::zero),
        rows,
    })
}

/// Asymptotic equivalence judged on finite data: `d1_m / m` at the largest
/// degree is below `tol` and non-increasing over the last [`TAIL_WINDOW`]
/// degrees.
pub fn equivalence_test(
    a: &GradedNorm,
    b: &GradedNorm,
    degrees: &[u32],
    tol: &Rat,
) -> Result<(bool, AsymptoticReport)> {
    if !tol.is_positive() {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let report = spectral_sequence(a, b, degrees)?;
    let d1s = report.d1s();
    let tail = &d1s[d1s.len().saturating_sub(TAIL_WINDOW)..];
    let decreasing = tail.windows(2).all(|w| w[1] <= w[0]);
    Ok((report.d1.last < *tol && decreasing, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationRow {
    pub k: u32,
    /// Largest requested degree divisible by `k`.
    pub degree: u32,
    /// `vol(norm^{(k)}_m, norm'^{(k)}_m) / m`.
    #[serde(with = "serde_rat")]
    pub vol_truncated: Rat,
    #[serde(with = "serde_rat")]
    pub gap: Rat,
    /// `(m, vol_m / m)` over every usable degree.
    pub sequence: Vec<(u32, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationTable {
    pub degree: u32,
    /// The untruncated estimate `vol_m / m` at the largest degree.
    #[serde(with = "serde_rat")]
    pub vol: Rat,
    pub rows: Vec<TruncationRow>,
}

impl TruncationTable {
    pub fn gaps(&self) -> Vec<Rat> {
        self.rows.iter().map(|r| r.gap.clone()).collect()
    }

    /// Columns `k,degree,vol_truncated,vol,gap`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,degree,vol_truncated,vol,gap\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.k, r.degree, r.vol_truncated, self.vol, r.gap
            )
            .expect("string write");
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        self.rows
            .iter()
            .map(|r| serde_json::to_string(r).expect("row serializes") + "\n")
            .collect()
    }
}

/// Compare the volumes of the degree-`k` truncations with the untruncated
/// volume. Truncated values are computed on the degrees divisible by `k`,
/// rescaled by the full degree so every row is on the same scale.
pub fn theorem_c_experiment(
    a: &GradedNormSpec,
    b: &GradedNormSpec,
    ks: &[u32],
    degrees: &[u32],
) -> Result<TruncationTable> {
    check_degrees(degrees)?;
    let top = *degrees.last().expect("nonempty");
    let full = spectral_sequence(
        &GradedNorm::new(a.clone())?,
        &GradedNorm::new(b.clone())?,
        &[top],
    )?;
    let vol = full.vol.last;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        if k == 0 {
            return Err(Error::Invalid("truncation level must be positive".into()));
        }
        let usable: Vec<u32> = degrees.iter().copied().filter(|m| m % k == 0).collect();
        if usable.is_empty() {
            return Err(Error::NotDivisible { degree: top, k });
        }
        let ta = GradedNorm::new(GradedNormSpec::truncated(a.clone(), k))?;
        let tb = GradedNorm::new(GradedNormSpec::truncated(b.clone(), k))?;
        let report = spectral_sequence(&ta, &tb, &usable)?;
        let vol_truncated = report.vol.last.clone();
        rows.push(TruncationRow {
            k,
            degree: *usable.last().expect("nonempty"),
            gap: (&vol_truncated - &vol).abs(),
            vol_truncated,
            sequence: report
                .rows
                .iter()
                .map(|r| (r.m, r.vol.to_string()))
                .collect(),
        });
    }
    Ok(TruncationTable {
        degree: top,
        vol,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{degree_one_p1, floor_g_p1, identity_weights_p1};
    use crate::norms::vol;
    use crate::random::random_diag_norm;
    use crate::rat::rat;
    use crate::section_ring::ScaleRule;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(spec: GradedNormSpec) -> GradedNorm {
        GradedNorm::new(spec).unwrap()
    }

    #[test]
    fn equal_norms_give_zero_reports() {
        let a = g(floor_g_p1());
        let r = spectral_sequence(&a, &a, &[1, 2, 5, 9]).unwrap();
        assert!(r
            .rows
            .iter()
            .all(|row| row.vol.is_zero() && row.d1.is_zero() && row.dinf.is_zero()));
        assert_eq!(r.vol.gap, Some(Rat::zero()));
    }

    #[test]
    fn degree_one_pair_volumes() {
        let c = rat(5, 3);
        let a = g(degree_one_p1(int(0), int(0)));
        let b = g(degree_one_p1(c.clone(), int(0)));
        let r = spectral_sequence(&a, &b, &[1, 2, 3, 7, 16]).unwrap();
        for row in &r.rows {
            assert_eq!(row.vol, -&c / int(2));
            assert_eq!(row.vol, row.spectrum.vol());
            // Degree-one generation: the rescaled d_∞ does not move.
            assert_eq!(row.dinf, c);
        }
        assert_eq!(r.dinf_sup, c);
        assert_eq!(r.extrapolated_vol(), Some(-&c / int(2)));
        assert!(r
            .to_csv()
            .starts_with("m,vol,d1,dinf,support\n1,-5/6,5/6,5/3,5/3\n"));
        assert_eq!(r.to_jsonl().lines().count(), 5);
    }

    #[test]
    fn antisymmetry_and_cocycle_per_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let specs = [
            floor_g_p1(),
            identity_weights_p1(),
            GradedNormSpec::degree_one(1, random_diag_norm(&mut rng, 2, 1)),
        ];
        let gs: Vec<GradedNorm> = specs.into_iter().map(g).collect();
        let degrees = [1, 2, 3, 4, 6];
        let ab = spectral_sequence(&gs[0], &gs[1], &degrees).unwrap();
        let ba = spectral_sequence(&gs[1], &gs[0], &degrees).unwrap();
        let ac = spectral_sequence(&gs[0], &gs[2], &degrees).unwrap();
        let cb = spectral_sequence(&gs[2], &gs[1], &degrees).unwrap();
        for i in 0..degrees.len() {
            assert_eq!(ab.rows[i].vol, -&ba.rows[i].vol);
            assert_eq!(ab.rows[i].vol, &ac.rows[i].vol + &cb.rows[i].vol);
        }
    }

    #[test]
    fn sublinear_scaling_is_equivalent() {
        let a = floor_g_p1();
        let sq = GradedNormSpec::scaled(a.clone(), ScaleRule::SqrtCeil { c: int(1) });
        let lin = GradedNormSpec::scaled(a.clone(), ScaleRule::Linear { c: int(1) });
        let (ga, gsq, glin) = (g(a), g(sq), g(lin));
        let degrees = [25, 50, 100, 200, 400];
        let tol = rat(1, 10);
        assert!(equivalence_test(&ga, &ga, &degrees, &tol).unwrap().0);
        let (ok, report) = equivalence_test(&ga, &gsq, &degrees, &tol).unwrap();
        assert!(ok);
        assert_eq!(report.d1.last, rat(20, 400));
        let (ok, report) = equivalence_test(&ga, &glin, &degrees, &tol).unwrap();
        assert!(!ok);
        assert!(report.rows.iter().all(|r| r.d1 == int(1)));
        assert!(equivalence_test(&ga, &ga, &degrees, &Rat::zero()).is_err());
        assert!(spectral_sequence(&ga, &ga, &[3, 2]).is_err());
    }

    #[test]
    fn boundedness_against_the_trivial_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trivial = g(GradedNormSpec::trivial(1));
        let specs = [
            floor_g_p1(),
            identity_weights_p1(),
            degree_one_p1(rat(3, 2), int(-1)),
            GradedNormSpec::degree_one(1, random_diag_norm(&mut rng, 2, 1)),
            GradedNormSpec::truncated(floor_g_p1(), 4),
        ];
        for spec in specs {
            let a = g(spec);
            let degrees: Vec<u32> = (1..=6).map(|i| i * 4).collect();
            let r = spectral_sequence(&a, &trivial, &degrees).unwrap();
            assert!(r.dinf_sup <= int(8), "{}", r.dinf_sup);
        }
    }

    #[test]
    fn truncation_of_degree_one_norms_is_idempotent() {
        let a = degree_one_p1(int(2), int(-1));
        let b = degree_one_p1(int(0), rat(1, 2));
        let t = theorem_c_experiment(&a, &b, &[1, 2, 4], &[4, 8, 12]).unwrap();
        assert!(t
            .rows
            .iter()
            .all(|r| r.vol_truncated == t.vol && r.gap.is_zero()));
        // Scaling by a constant commutes with truncation and shifts every row.
        let c = rat(3, 7);
        let shifted = GradedNormSpec::scaled(floor_g_p1(), ScaleRule::Linear { c: c.clone() });
        let base =
            theorem_c_experiment(&floor_g_p1(), &GradedNormSpec::trivial(1), &[1, 2, 4], &[8])
                .unwrap();
        let moved =
            theorem_c_experiment(&shifted, &GradedNormSpec::trivial(1), &[1, 2, 4], &[8]).unwrap();
        for (x, y) in base.rows.iter().zip(&moved.rows) {
            assert_eq!(&y.vol_truncated - &x.vol_truncated, c);
        }
        assert!(theorem_c_experiment(&a, &b, &[5], &[4, 8]).is_err());
    }

    #[test]
    fn truncated_volumes_approach_the_full_volume() {
        let table = theorem_c_experiment(
            &floor_g_p1(),
            &GradedNormSpec::trivial(1),
            &[1, 2, 4, 8, 16],
            &[16, 32, 64],
        )
        .unwrap();
        let gaps = table.gaps();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "{gaps:?}");
        assert!(gaps[4] < rat(1, 20));
        // Cross-check the untruncated value against the volume of the degree 64 pieces.
        let (a, t) = (g(floor_g_p1()), g(GradedNormSpec::trivial(1)));
        assert_eq!(
            table.vol,
            vol(&a.norm_at(64).unwrap(), &t.norm_at(64).unwrap()).unwrap() / int(64)
        );
    }
}
