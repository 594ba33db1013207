//! Chebyshev envelopes of `Φ` and the equidistribution of `μ(k)`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::rat::{abs, int, Rat};
use crate::section_ring::lattice_points;

use super::lp::maximize;
use super::phi::{mu_measure, superlevel_slice, PhiData};

/// Vertices of the upper concave hull of a planar point set, by increasing `x`.
/// Collinear middle points are dropped.
pub fn upper_hull(points: &[(Rat, Rat)]) -> Vec<(Rat, Rat)> {
    let mut pts = points.to_vec();
    pts.sort();
    // Keep the highest point over each x.
    let mut top: Vec<(Rat, Rat)> = Vec::with_capacity(pts.len());
    for p in pts {
        match top.last_mut() {
            Some(last) if last.0 == p.0 => *last = p,
            _ => top.push(p),
        }
    }
    let mut hull: Vec<(Rat, Rat)> = Vec::with_capacity(top.len());
    for p in top {
        while hull.len() >= 2 {
            let (a, b) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            // Drop b unless it lies strictly above the segment a-p.
            let cross = (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0);
            if cross >= Rat::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// A concave piecewise-linear function on an interval, stored by its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope1d {
    vertices: Vec<(Rat, Rat)>,
}

impl Envelope1d {
    pub fn from_points(points: &[(Rat, Rat)]) -> Option<Self> {
        (!points.is_empty()).then(|| Envelope1d {
            vertices: upper_hull(points),
        })
    }

    pub fn vertices(&self) -> &[(Rat, Rat)] {
        &self.vertices
    }

    pub fn domain(&self) -> (&Rat, &Rat) {
        (
            &self.vertices[0].0,
            &self.vertices[self.vertices.len() - 1].0,
        )
    }

    /// `None` outside the domain, where the envelope is `-∞`.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        let i = self.vertices.partition_point(|v| v.0 <= *x);
        if i == self.vertices.len() {
            return Some(self.vertices[i - 1].1.clone());
        }
        let ((x0, y0), (x1, y1)) = (&self.vertices[i - 1], &self.vertices[i]);
        Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }
}

/// `(λ{G <= t}, λ{G < t})` for the normalized Lebesgue measure `λ` on the domain of `G`.
/// A one-point domain carries the Dirac mass.
pub fn pushforward_cdf(g: &Envelope1d, t: &Rat) -> (Rat, Rat) {
    let v = &g.vertices;
    if v.len() == 1 {
        let y = &v[0].1;
        let ind = |b: bool| if b { Rat::one() } else { Rat::zero() };
        return (ind(y <= t), ind(y < t));
    }
    let (mut le, mut lt) = (Rat::zero(), Rat::zero());
    for w in v.windows(2) {
        let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
        let len = x1 - x0;
        if y0 == y1 {
            if y0 <= t {
                le += &len;
            }
            if y0 < t {
                lt += &len;
            }
            continue;
        }
        // On a sloped segment the level set {G = t} is a single point.
        let s = x0 + (t - y0) * &len / (y1 - y0);
        let s = s.clamp(x0.clone(), x1.clone());
        let part = if y1 > y0 { &s - x0 } else { x1 - &s };
        le += &part;
        lt += part;
    }
    let total = &v[v.len() - 1].0 - &v[0].0;
    (le / &total, lt / total)
}

/// Exact `sup_t |F_μ(t) - F(t)|` against the pushforward of Lebesgue measure by `g`.
///
/// Both CDFs are right-continuous; between consecutive atoms of `μ` and vertex
/// values of `g` one is constant and the other affine, so the supremum is a
/// value or a left limit at one of those points.
pub fn kolmogorov_to_pushforward(mu: &AtomicMeasure, g: &Envelope1d) -> Rat {
    let mut ts: Vec<Rat> = mu
        .atoms()
        .iter()
        .map(|a| a.location.clone())
        .chain(g.vertices.iter().map(|v| v.1.clone()))
        .collect();
    ts.sort();
    ts.dedup();
    ts.iter()
        .flat_map(|t| {
            let (le, lt) = pushforward_cdf(g, t);
            [abs(&(mu.cdf(t) - le)), abs(&(mu.cdf_left(t) - lt))]
        })
        .max()
        .unwrap_or_else(Rat::zero)
}

/// Points `α/q` for `α` in `q Δ_d`.
pub fn simplex_grid(d: usize, q: u32) -> Vec<Vec<Rat>> {
    let qi = int(q as i64);
    lattice_points(d, q)
        .into_iter()
        .map(|a| a.iter().map(|&c| int(c as i64) / &qi).collect())
        .collect()
}

/// Envelope value at `x` by the linear program
/// `max Σ λ_i y_i` over `λ >= 0`, `Σ λ_i = 1`, `Σ λ_i p_i = x`.
fn lp_envelope(cloud: &[(Vec<Rat>, Rat)], x: &[Rat]) -> Option<Rat> {
    let d = x.len();
    let mut a: Vec<Vec<Rat>> = (0..d)
        .map(|i| cloud.iter().map(|(p, _)| p[i].clone()).collect())
        .collect();
    a.push(vec![Rat::one(); cloud.len()]);
    let mut b = x.to_vec();
    b.push(Rat::one());
    let c: Vec<Rat> = cloud.iter().map(|(_, y)| y.clone()).collect();
    maximize(&a, &b, &c)
}

/// The upper concave envelope of `{(α/n, Φ(n, α)/n) : 1 <= n <= max_level}` at
/// each grid point; `None` where the point lies outside the hull.
pub fn chebyshev_transform(
    phi: &PhiData,
    max_level: u32,
    grid: &[Vec<Rat>],
) -> Result<Vec<Option<Rat>>> {
    let cloud = phi.point_cloud(max_level);
    if cloud.is_empty() {
        return Err(Error::Invalid(format!(
            "Φ has no stored level in 1..={max_level}"
        )));
    }
    if let Some(x) = grid.iter().find(|x| x.len() != phi.n_dim) {
        return Err(Error::DimensionMismatch {
            expected: phi.n_dim,
            got: x.len(),
        });
    }
    if phi.n_dim == 1 {
        let planar: Vec<(Rat, Rat)> = cloud.into_iter().map(|(p, y)| (p[0].clone(), y)).collect();
        let env = Envelope1d::from_points(&planar).expect("nonempty cloud");
        return Ok(grid.iter().map(|x| env.eval(&x[0])).collect());
    }
    Ok(grid.iter().map(|x| lp_envelope(&cloud, x)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquidistributionRow {
    pub k: u32,
    #[serde(with = "crate::rat::serde_rat")]
    pub distance: Rat,
    /// Thresholds `t` where `μ(k)([t, ∞))` was compared with the superlevel count ratio.
    pub tail_checks: usize,
    pub tail_mismatches: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquidistributionReport {
    pub d: usize,
    pub envelope_level: u32,
    /// `false` when the reference measure was sampled on a grid (`d >= 2`).
    pub exact: bool,
    pub rows: Vec<EquidistributionRow>,
}

impl EquidistributionReport {
    pub fn distances(&self) -> Vec<Rat> {
        self.rows.iter().map(|r| r.distance.clone()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,distance,tail_checks,tail_mismatches,exact\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.k, r.distance, r.tail_checks, r.tail_mismatches, self.exact
            ));
        }
        out
    }
}

/// Compare `μ(k)` with the pushforward of normalized Lebesgue measure on
/// `Δ` by the Chebyshev envelope built from levels up to `envelope_level`.
///
/// For `d = 1` the distance is exact. For `d >= 2` the reference measure is
/// the pushforward of the uniform measure on `simplex_grid(d, grid)`.
/// Each row also checks `μ(k)([t, ∞)) = |{α ∈ Γ_k : Φ(k, α) >= k t}| / |Γ_k|`
/// at every atom, between atoms and above the support.
pub fn equidistribution_check(
    phi: &PhiData,
    ks: &[u32],
    envelope_level: u32,
    grid: u32,
) -> Result<EquidistributionReport> {
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("ks must be strictly increasing".into()));
    }
    let cloud = phi.point_cloud(envelope_level);
    if cloud.is_empty() {
        return Err(Error::Invalid(format!(
            "Φ has no stored level in 1..={envelope_level}"
        )));
    }
    let d = phi.n_dim;
    let reference: Box<dyn Fn(&AtomicMeasure) -> Rat> = if d == 1 {
        let planar: Vec<(Rat, Rat)> = cloud.into_iter().map(|(p, y)| (p[0].clone(), y)).collect();
        let env = Envelope1d::from_points(&planar).expect("nonempty cloud");
        Box::new(move |mu| kolmogorov_to_pushforward(mu, &env))
    } else {
        if grid == 0 {
            return Err(Error::Invalid("grid must be positive".into()));
        }
        let values: Vec<Rat> = simplex_grid(d, grid)
            .iter()
            .filter_map(|x| lp_envelope(&cloud, x))
            .collect();
        let pushed = AtomicMeasure::empirical(&values);
        Box::new(move |mu| mu.kolmogorov_distance(&pushed))
    };
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let mu = mu_measure(phi, k)?;
        let mut ts: Vec<Rat> = mu.atoms().iter().map(|a| a.location.clone()).collect();
        let mids: Vec<Rat> = ts.windows(2).map(|w| (&w[0] + &w[1]) / int(2)).collect();
        let above = ts.last().map(|t| t + Rat::one());
        ts.extend(mids);
        ts.extend(above);
        let total = int(phi.level(k).expect("stored level").count() as i64);
        let mismatches = ts
            .iter()
            .filter(|t| {
                let count = superlevel_slice(phi, Some(t), k)
                    .expect("stored level")
                    .len();
                mu.upper_tail(t) != int(count as i64) / &total
            })
            .count();
        rows.push(EquidistributionRow {
            k,
            distance: reference(&mu),
            tail_checks: ts.len(),
            tail_mismatches: mismatches,
        });
    }
    Ok(EquidistributionReport {
        d,
        envelope_level,
        exact: d == 1,
        rows,
    })
}
