//! Toric potentials on the skeleton of `P^1`.
//!
//! A monomial-diagonal norm on `H^0(O(m))` with weights `w_j` has the
//! Fubini–Study potential `û(r) = max_j (-j r + w_j) / m`, a convex
//! piecewise-linear function with slopes in `[-1, 0]`. Its Monge–Ampère
//! measure is the slope jump at each kink; this identification is the
//! standard toric one and is taken as given here.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::norms::{vol, DiagNorm};
use crate::rat::{abs, int, rat, serde_rat, Rat};
use crate::section_ring::{GradedNorm, GradedNormSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "serde_rat")]
    pub slope: Rat,
    #[serde(with = "serde_rat")]
    pub intercept: Rat,
}

impl Piece {
    pub fn new(slope: Rat, intercept: Rat) -> Self {
        Piece { slope, intercept }
    }

    fn at(&self, r: &Rat) -> Rat {
        &self.slope * r + &self.intercept
    }
}

/// `r ↦ max_i (s_i r + c_i)` in canonical form: slopes strictly increasing,
/// every piece attains the maximum on an interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Piece>", into = "Vec<Piece>")]
pub struct PLConvex {
    pieces: Vec<Piece>,
}

impl TryFrom<Vec<Piece>> for PLConvex {
    type Error = Error;

    fn try_from(pieces: Vec<Piece>) -> Result<Self> {
        PLConvex::new(pieces)
    }
}

impl From<PLConvex> for Vec<Piece> {
    fn from(u: PLConvex) -> Self {
        u.pieces
    }
}

/// Where `a` and `b` agree, for `a.slope < b.slope`.
fn crossing(a: &Piece, b: &Piece) -> Rat {
    (&a.intercept - &b.intercept) / (&b.slope - &a.slope)
}

impl PLConvex {
    /// Requires at least one piece and slopes in `[-1, 0]`.
    pub fn new(mut pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Invalid(
                "a potential needs at least one piece".into(),
            ));
        }
        if let Some(p) = pieces
            .iter()
            .find(|p| p.slope > Rat::zero() || p.slope < -Rat::one())
        {
            return Err(Error::Invalid(format!(
                "slope {} is outside [-1, 0]",
                p.slope
            )));
        }
        pieces.sort_by(|a, b| {
            a.slope
                .cmp(&b.slope)
                .then_with(|| b.intercept.cmp(&a.intercept))
        });
        pieces.dedup_by(|later, kept| later.slope == kept.slope);
        let mut hull: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            while hull.len() >= 2 {
                let (i, j) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
                if crossing(i, j) >= crossing(j, &p) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        Ok(PLConvex { pieces: hull })
    }

    pub fn affine(slope: Rat, intercept: Rat) -> Result<Self> {
        PLConvex::new(vec![Piece::new(slope, intercept)])
    }

    /// `max(a, -r + b)`.
    pub fn two_piece(a: Rat, b: Rat) -> Self {
        PLConvex::new(vec![Piece::new(Rat::zero(), a), Piece::new(-Rat::one(), b)])
            .expect("slopes in range")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, r: &Rat) -> Rat {
        self.pieces.iter().map(|p| p.at(r)).max().expect("nonempty")
    }

    /// Kinks in increasing order; the slope increases across each.
    pub fn kinks(&self) -> Vec<Rat> {
        self.pieces
            .windows(2)
            .map(|w| crossing(&w[0], &w[1]))
            .collect()
    }

    pub fn min_slope(&self) -> &Rat {
        &self.pieces[0].slope
    }

    pub fn max_slope(&self) -> &Rat {
        &self.pieces[self.pieces.len() - 1].slope
    }

    /// `u(r) + c`.
    pub fn shift(&self, c: &Rat) -> PLConvex {
        PLConvex {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece::new(p.slope.clone(), &p.intercept + c))
                .collect(),
        }
    }

    /// Pointwise maximum.
    pub fn max(&self, other: &PLConvex) -> PLConvex {
        PLConvex::new(self.pieces.iter().chain(&other.pieces).cloned().collect())
            .expect("valid pieces")
    }

    /// Rows `slope,intercept`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slope,intercept\n");
        for p in &self.pieces {
            out.push_str(&format!("{},{}\n", p.slope, p.intercept));
        }
        out
    }
}

/// Atoms at the kinks with mass equal to the slope jump.
pub fn ma_measure(u: &PLConvex) -> AtomicMeasure {
    AtomicMeasure::from_atoms(
        u.kinks()
            .into_iter()
            .zip(u.pieces.windows(2))
            .map(|(r, w)| (r, &w[1].slope - &w[0].slope)),
    )
}

/// `½ [∫ (u - v) dMA(u) + ∫ (u - v) dMA(v)]`; both measures must have mass 1.
pub fn energy(u: &PLConvex, v: &PLConvex) -> Result<Rat> {
    let (mu, mv) = (ma_measure(u), ma_measure(v));
    for m in [&mu, &mv] {
        if !m.total_mass().is_one() {
            return Err(Error::MassMismatch(m.total_mass().to_string(), "1".into()));
        }
    }
    let diff = |r: &Rat| u.eval(r) - v.eval(r);
    Ok((mu.integrate(diff) + mv.integrate(diff)) / int(2))
}

/// `sup_r |u(r) - v(r)|`, or `None` when the difference is unbounded.
pub fn sup_abs_diff(u: &PLConvex, v: &PLConvex) -> Option<Rat> {
    if u.min_slope() != v.min_slope() || u.max_slope() != v.max_slope() {
        return None;
    }
    let mut rs = u.kinks();
    rs.extend(v.kinks());
    if rs.is_empty() {
        // Two parallel lines.
        rs.push(Rat::zero());
    }
    rs.iter().map(|r| abs(&(u.eval(r) - v.eval(r)))).max()
}

/// `û(r) = max_j (-j r + w_j) / m` for monomial weights `w_0, …, w_m`.
pub fn fs_skeleton(norm: &DiagNorm, m: u32) -> Result<PLConvex> {
    let w = norm.monomial_weights().ok_or(Error::NotMonomialDiagonal)?;
    if m == 0 || w.len() != m as usize + 1 {
        return Err(Error::DimensionMismatch {
            expected: m as usize + 1,
            got: w.len(),
        });
    }
    let mm = int(m as i64);
    PLConvex::new(
        w.iter()
            .enumerate()
            .map(|(j, wj)| Piece::new(rat(-(j as i64), m as i64), wj / &mm))
            .collect(),
    )
}

/// The monomial norm with weights `w_j = inf_r (j r + m u(r))`.
///
/// Needs slopes reaching both `-1` and `0`, so every infimum is finite: it is
/// attained at a kink, or at `-∞` for `j = m` and at `+∞` for `j = 0`.
pub fn supnorm_toric(u: &PLConvex, m: u32) -> Result<DiagNorm> {
    if *u.min_slope() != -Rat::one() || !u.max_slope().is_zero() {
        return Err(Error::Invalid(
            "the supremum norm needs slopes from -1 up to 0".into(),
        ));
    }
    if m == 0 {
        return Err(Error::Invalid("degree must be positive".into()));
    }
    let mm = int(m as i64);
    let kinks = u.kinks();
    let first = &u.pieces[0].intercept * &mm;
    let last = &u.pieces[u.pieces.len() - 1].intercept * &mm;
    let weights = (0..=m)
        .map(|j| {
            let jj = int(j as i64);
            let mut best = kinks
                .iter()
                .map(|r| &jj * r + &mm * u.eval(r))
                .min()
                .expect("at least one kink");
            if j == m && first < best {
                best = first.clone();
            }
            if j == 0 && last < best {
                best = last.clone();
            }
            best
        })
        .collect();
    Ok(DiagNorm::monomial(weights))
}

/// A random potential with slopes in `(1/q) Z ∩ [-1, 0]`, always including
/// both extremes, and integer-over-`q` intercepts.
pub fn random_potential(rng: &mut impl Rng, pieces: usize, q: i64) -> PLConvex {
    let mut ps = vec![
        Piece::new(-Rat::one(), rat(rng.gen_range(-4 * q..=4 * q), q)),
        Piece::new(Rat::zero(), rat(rng.gen_range(-4 * q..=4 * q), q)),
    ];
    for _ in 0..pieces {
        ps.push(Piece::new(
            rat(-rng.gen_range(0..=q), q),
            rat(rng.gen_range(-4 * q..=4 * q), q),
        ));
    }
    PLConvex::new(ps).expect("slopes in range")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnergyRow {
    pub m: u32,
    #[serde(with = "serde_rat")]
    pub energy: Rat,
    #[serde(with = "serde_rat")]
    pub vol_over_m: Rat,
    #[serde(with = "serde_rat")]
    pub gap: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnergyTable {
    pub rows: Vec<EnergyRow>,
}

impl EnergyTable {
    pub fn gaps(&self) -> Vec<Rat> {
        self.rows.iter().map(|r| r.gap.clone()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,energy,vol_over_m,gap\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.m, r.energy, r.vol_over_m, r.gap
            ));
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        self.rows
            .iter()
            .map(|r| serde_json::to_string(r).expect("rows serialize") + "\n")
            .collect()
    }
}

/// Per degree: the energy of the two Fubini–Study potentials, `vol_m / m`, and `|E_m - vol_m / m|`.
pub fn theorem_b_experiment(
    a: &GradedNormSpec,
    b: &GradedNormSpec,
    degrees: &[u32],
) -> Result<EnergyTable> {
    if a.n != 1 || b.n != 1 {
        return Err(Error::Invalid("potentials live on P^1".into()));
    }
    let (ga, gb) = (GradedNorm::new(a.clone())?, GradedNorm::new(b.clone())?);
    let mut rows = Vec::with_capacity(degrees.len());
    for &m in degrees {
        let (na, nb) = (ga.norm_at(m)?, gb.norm_at(m)?);
        let e = energy(&fs_skeleton(&na, m)?, &fs_skeleton(&nb, m)?)?;
        let v = vol(&na, &nb)? / int(m as i64);
        rows.push(EnergyRow {
            m,
            gap: abs(&(&e - &v)),
            energy: e,
            vol_over_m: v,
        });
    }
    Ok(EnergyTable { rows })
}

/// `u >= v` everywhere, decided at kinks and by the asymptotic slopes.
pub fn dominates(u: &PLConvex, v: &PLConvex) -> bool {
    let mut rs = u.kinks();
    rs.extend(v.kinks());
    rs.push(Rat::zero());
    // Beyond every breakpoint u - v is affine and must not head to -∞.
    u.min_slope() <= v.min_slope()
        && u.max_slope() >= v.max_slope()
        && rs.iter().all(|r| u.eval(r) >= v.eval(r))
}
