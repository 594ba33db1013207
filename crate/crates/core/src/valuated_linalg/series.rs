//! Truncated Laurent series with integer coefficients and tracked precision.
//!
//! Used to read valuations off large eliminations without carrying exact
//! rational functions through every step. The eliminations here are
//! fraction-free: instead of dividing by a pivot, the target row is
//! multiplied by it and the row's shift is lowered by the pivot's order,
//! which leaves every shifted valuation of every minor unchanged.
//!
//! A pivot is only accepted when truncation provably cannot change which
//! entry is minimal, so the pivot values are exactly those of the exact
//! elimination; otherwise the caller retries at higher precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rat::Rat;
use crate::valued_field::Poly;

use super::Matrix;

const EXACT: i64 = i64::MAX;

/// `Σ num[k] u^(start+k) + O(u^prec)`. The leading coefficient is nonzero
/// when present; no coefficients means "zero to the known precision", and
/// `prec == EXACT` marks a true zero.
#[derive(Clone, Debug)]
pub(crate) struct Series {
    start: i64,
    num: Vec<BigInt>,
    prec: i64,
}

impl Series {
    pub fn zero() -> Self {
        Series {
            start: EXACT,
            num: Vec::new(),
            prec: EXACT,
        }
    }

    fn is_exact_zero(&self) -> bool {
        self.prec == EXACT
    }

    /// The exact `u`-order when the leading term is known.
    pub fn order(&self) -> Option<i64> {
        (!self.num.is_empty()).then_some(self.start)
    }

    /// A lower bound for the `u`-order of the true value.
    pub fn lower(&self) -> i64 {
        self.start
    }

    fn normalized(mut start: i64, mut num: Vec<BigInt>, prec: i64) -> Self {
        let lead = num.iter().position(|c| !c.is_zero()).unwrap_or(num.len());
        if lead > 0 {
            num.drain(..lead);
            start += lead as i64;
        }
        if num.is_empty() {
            start = prec;
        }
        Series { start, num, prec }
    }

    fn coeff_at(&self, e: i64) -> Option<&BigInt> {
        if e < self.start {
            return None;
        }
        self.num.get((e - self.start) as usize)
    }

    pub fn sub(&self, other: &Series) -> Series {
        if other.is_exact_zero() {
            return self.clone();
        }
        if self.is_exact_zero() {
            return Series {
                start: other.start,
                num: other.num.iter().map(|c| -c).collect(),
                prec: other.prec,
            };
        }
        let start = self.start.min(other.start);
        let prec = self.prec.min(other.prec);
        let num = (start..prec)
            .map(|e| match (self.coeff_at(e), other.coeff_at(e)) {
                (Some(a), Some(b)) => a - b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => -b,
                (None, None) => BigInt::zero(),
            })
            .collect();
        Series::normalized(start, num, prec)
    }

    pub fn mul(&self, other: &Series) -> Series {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Series::zero();
        }
        let start = self.start + other.start;
        let prec = (self.prec + other.start).min(other.prec + self.start);
        let len = (prec - start).max(0) as usize;
        let mut num = vec![BigInt::zero(); len];
        for (i, a) in self.num.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    num[i + j] += a * b;
                }
            }
        }
        Series::normalized(start, num, prec)
    }

    fn one() -> Self {
        Series {
            start: 0,
            num: vec![BigInt::one()],
            prec: EXACT,
        }
    }

    /// `self / p` when the true quotient has integer coefficients; `p` must
    /// have a known leading term.
    fn div_exact(&self, p: &Series) -> Series {
        if self.is_exact_zero() {
            return Series::zero();
        }
        let vp = p.start;
        let p_rel = if p.prec == EXACT {
            i64::MAX
        } else {
            p.prec - vp
        };
        let start = self.start - vp;
        let prec = if p_rel == i64::MAX {
            self.prec - vp
        } else {
            (self.prec - vp).min(start + p_rel)
        };
        let len = (prec - start).max(0) as usize;
        let p0 = &p.num[0];
        let mut q: Vec<BigInt> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = self.num.get(k).cloned().unwrap_or_default();
            for i in 1..=k.min(p.num.len().saturating_sub(1)) {
                if !p.num[i].is_zero() && !q[k - i].is_zero() {
                    acc -= &p.num[i] * &q[k - i];
                }
            }
            debug_assert!((&acc % p0).is_zero(), "inexact series division");
            q.push(acc / p0);
        }
        Series::normalized(start, q, prec)
    }

    /// `(self * p - other * q) / prev`, the fraction-free update.
    fn cross(&self, p: &Series, other: &Series, q: &Series, prev: &Series) -> Series {
        let x = self.mul(p).sub(&other.mul(q));
        if prev.prec == EXACT && prev.start == 0 && prev.num.len() == 1 && prev.num[0].is_one() {
            x
        } else {
            x.div_exact(prev)
        }
    }
}

pub(crate) type SeriesMatrix = Vec<Vec<Series>>;

/// Rows of `m` to relative precision `rel`. Each row is multiplied by the
/// lcm of its denominators and then by a positive integer, so the entries
/// are Laurent polynomials with integer coefficients. The polynomial factor
/// has nonzero constant term, so valuations are unchanged.
pub(crate) fn to_series(m: &Matrix, ram: u32, rel: usize) -> SeriesMatrix {
    to_series_joint(&[m], ram, rel).pop().expect("one matrix")
}

/// [`to_series`] for matrices sharing their rows: row `i` of every matrix
/// gets the same factor, as when expanding `[a | b]` for `a^{-1} b`.
pub(crate) fn to_series_joint(ms: &[&Matrix], ram: u32, rel: usize) -> Vec<SeriesMatrix> {
    let ms: Vec<Matrix> = ms.iter().map(|m| m.lift_to(ram)).collect();
    let rows = ms.first().map_or(0, |m| m.rows());
    let mut out: Vec<SeriesMatrix> = ms.iter().map(|_| Vec::with_capacity(rows)).collect();
    for i in 0..rows {
        let row: Vec<_> = ms.iter().flat_map(|m| m.row(i).iter()).collect();
        let common = row
            .iter()
            .filter(|x| !x.is_zero())
            .fold(Poly::one(), |acc, x| {
                let den = x.denominator();
                if den.is_one() {
                    return acc;
                }
                acc.mul(&den.div_rem(&acc.gcd(den)).0)
            });
        let entries: Vec<Option<(i64, Poly)>> = row
            .iter()
            .map(|x| {
                let shift = x.u_order()?;
                let (num, _) = x.numerator();
                let den = x.denominator();
                let cofactor = if den.is_one() {
                    common.clone()
                } else {
                    common.div_rem(den).0
                };
                Some((shift, num.mul(&cofactor)))
            })
            .collect();
        let scale = entries
            .iter()
            .flatten()
            .flat_map(|(_, p)| p.coeffs().iter())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut entries = entries.into_iter();
        for (k, m) in ms.iter().enumerate() {
            let series = entries
                .by_ref()
                .take(m.cols())
                .map(|e| match e {
                    None => Series::zero(),
                    Some((shift, p)) => {
                        let num = p
                            .coeffs()
                            .iter()
                            .take(rel)
                            .map(|c| c.numer() * (&scale / c.denom()))
                            .collect();
                        Series::normalized(shift, num, shift + rel as i64)
                    }
                })
                .collect();
            out[k].push(series);
        }
    }
    out
}

/// Rows of `a^{-1} b`, each multiplied by `det a`, together with the
/// `u`-order of that scalar for every row. Fraction-free Gauss-Jordan with
/// exact division by the previous pivot keeps every entry a minor of
/// `[a | b]`. `None` when the precision does not certify a pivot.
pub(crate) fn solve(mut a: SeriesMatrix, mut b: SeriesMatrix) -> Option<(SeriesMatrix, Vec<i64>)> {
    let d = a.len();
    let mut used = vec![false; d];
    let mut pivot_row = vec![0usize; d];
    let mut prev = Series::one();
    for col in 0..d {
        let (_, p) = (0..d)
            .filter(|&r| !used[r])
            .filter_map(|r| a[r][col].order().map(|o| (o, r)))
            .min()?;
        used[p] = true;
        pivot_row[col] = p;
        let piv = a[p][col].clone();
        for r in (0..d).filter(|&r| r != p) {
            let f = std::mem::replace(&mut a[r][col], Series::zero());
            for c in col + 1..d {
                let x = a[r][c].cross(&piv, &a[p][c], &f, &prev);
                a[r][c] = x;
            }
            for c in 0..b[r].len() {
                let x = b[r][c].cross(&piv, &b[p][c], &f, &prev);
                b[r][c] = x;
            }
        }
        prev = piv;
    }
    // Every row now reads `det * x_i = b_p` up to the sign of `det`.
    let order = prev.order().expect("certified pivot");
    let rows = pivot_row
        .iter()
        .map(|&p| std::mem::take(&mut b[p]))
        .collect();
    Some((rows, vec![order; d]))
}

/// `u`-order of the determinant, or `None` when precision runs out.
pub(crate) fn det_order(mut a: SeriesMatrix) -> Option<i64> {
    let d = a.len();
    let mut prev = Series::one();
    for col in 0..d {
        let (_, p) = (col..d)
            .filter_map(|r| a[r][col].order().map(|o| (o, r)))
            .min()?;
        a.swap(col, p);
        let piv = a[col][col].clone();
        for r in col + 1..d {
            let f = std::mem::replace(&mut a[r][col], Series::zero());
            for c in col + 1..d {
                let x = a[r][c].cross(&piv, &a[col][c], &f, &prev);
                a[r][c] = x;
            }
        }
        prev = piv;
    }
    // The last pivot is the determinant up to sign.
    prev.order()
}

pub(crate) enum Reduction {
    /// Pivot values in `u` units, in the order chosen.
    Pivots(Vec<(usize, usize, Rat)>),
    NeedPrecision,
}

/// Certified counterpart of the exact pivoting elimination. Shifts are in
/// `u` units.
pub(crate) fn reduce(mut t: SeriesMatrix, row: &[Rat], col: &[Rat]) -> Reduction {
    let rows = t.len();
    let cols = col.len();
    let mut row = row.to_vec();
    let mut row_active = vec![true; rows];
    let mut col_active = vec![true; cols];
    let mut pivots = Vec::new();
    let mut prev = Series::one();
    loop {
        let mut best: Option<(Rat, usize, usize)> = None;
        let mut floor: Option<Rat> = None;
        let mut any_unknown = false;
        for i in (0..rows).filter(|&i| row_active[i]) {
            for j in (0..cols).filter(|&j| col_active[j]) {
                let x = &t[i][j];
                if x.is_exact_zero() {
                    continue;
                }
                let shift = &row[i] + &col[j];
                match x.order() {
                    Some(o) => {
                        let v = Rat::from_integer(o.into()) + shift;
                        if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                            best = Some((v, i, j));
                        }
                    }
                    None => {
                        any_unknown = true;
                        let v = Rat::from_integer(x.lower().into()) + shift;
                        if floor.as_ref().is_none_or(|f| v < *f) {
                            floor = Some(v);
                        }
                    }
                }
            }
        }
        let Some((value, pi, pj)) = best else {
            if any_unknown {
                return Reduction::NeedPrecision;
            }
            break;
        };
        if floor.is_some_and(|f| f <= value) {
            return Reduction::NeedPrecision;
        }
        let piv = t[pi][pj].clone();
        // Rows are multiplied by piv / prev.
        let o = Rat::from_integer((piv.start - prev.start).into());
        for l in (0..rows).filter(|&l| l != pi && row_active[l]) {
            let f = std::mem::replace(&mut t[l][pj], Series::zero());
            for c in (0..cols).filter(|&c| c != pj && col_active[c]) {
                let x = t[l][c].cross(&piv, &t[pi][c], &f, &prev);
                t[l][c] = x;
            }
            row[l] -= &o;
        }
        row_active[pi] = false;
        col_active[pj] = false;
        pivots.push((pi, pj, value));
        prev = piv;
    }
    Reduction::Pivots(pivots)
}
