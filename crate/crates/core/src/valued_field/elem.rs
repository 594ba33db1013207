use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::Poly;
use crate::error::{Error, Result};
use crate::rat::{int, parse_rat, Rat, Val};

/// An element of `Q(u)` with `u = t^(1/N)`, valued by `ν(t) = 1`.
///
/// Canonical form: `x = u^shift * num(u) / den(u)` with `num(0) != 0`,
/// `den(0) = 1` and `gcd(num, den) = 1`. Zero is `num = 0, shift = 0, den = 1`.
#[derive(Clone)]
pub struct FieldElem {
    num: Poly,
    shift: i64,
    den: Poly,
    ram: u32,
}

impl FieldElem {
    pub fn zero() -> Self {
        FieldElem::zero_in(1)
    }

    pub fn zero_in(ram: u32) -> Self {
        FieldElem {
            num: Poly::zero(),
            shift: 0,
            den: Poly::one(),
            ram,
        }
    }

    pub fn one() -> Self {
        FieldElem::from_rat(Rat::one())
    }

    pub fn from_int(c: i64) -> Self {
        FieldElem::from_rat(int(c))
    }

    pub fn from_rat(c: Rat) -> Self {
        FieldElem::monomial(c, 0, 1)
    }

    /// `c * u^k` in the field with ramification `ram`.
    pub fn monomial(c: Rat, k: i64, ram: u32) -> Self {
        assert!(ram >= 1, "ramification must be positive");
        if c.is_zero() {
            return FieldElem::zero_in(ram);
        }
        FieldElem {
            num: Poly::constant(c),
            shift: k,
            den: Poly::one(),
            ram,
        }
    }

    /// The uniformizer `t` itself.
    pub fn t() -> Self {
        FieldElem::monomial(Rat::one(), 1, 1)
    }

    /// `t^q` for `q` in `(1/ram)Z`; panics if `q` does not fit that value group.
    pub fn t_pow(q: &Rat, ram: u32) -> Self {
        let scaled = q * int(ram as i64);
        assert!(
            scaled.is_integer(),
            "t^{q} needs ramification divisible by {}",
            q.denom()
        );
        let k: i64 = scaled.to_integer().try_into().expect("exponent overflow");
        FieldElem::monomial(Rat::one(), k, ram)
    }

    /// Build `u^shift * num / den` and bring it to canonical form.
    pub fn from_parts(num: Poly, shift: i64, den: Poly, ram: u32) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, shift, den, ram))
    }

    fn normalize(mut num: Poly, mut shift: i64, mut den: Poly, ram: u32) -> Self {
        let Some(k) = num.ord() else {
            return FieldElem::zero_in(ram);
        };
        if k > 0 {
            num = num.shift_down(k);
            shift += k as i64;
        }
        let k = den.ord().expect("zero denominator");
        if k > 0 {
            den = den.shift_down(k);
            shift -= k as i64;
        }
        if den.degree() != Some(0) {
            let g = num.gcd(&den);
            if !g.is_one() {
                num = num.div_rem(&g).0;
                den = den.div_rem(&g).0;
            }
        }
        let c = den.coeff(0);
        if !c.is_one() {
            let inv = Rat::one() / c;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        FieldElem {
            num,
            shift,
            den,
            ram,
        }
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    /// True for Laurent polynomials (denominator one).
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// `ν(x)`, normalized by `ν(t) = 1`; `+∞` at zero.
    pub fn val(&self) -> Val {
        if self.is_zero() {
            Val::Infinity
        } else {
            Val::Finite(Rat::new(self.shift.into(), (self.ram as i64).into()))
        }
    }

    /// Valuation of a nonzero element; panics at zero.
    pub fn val_finite(&self) -> Rat {
        self.val().expect_finite()
    }

    /// Exponent of `u` in the lowest-order term.
    pub fn u_order(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.shift)
    }

    /// Coefficient of the lowest-order term (its "angular component").
    pub fn leading_coeff(&self) -> Rat {
        self.num.coeff(0)
    }

    pub fn numerator(&self) -> (&Poly, i64) {
        (&self.num, self.shift)
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// View the same element over `K(t^(1/(N*m)))`; the valuation is unchanged.
    pub fn ramify(&self, m: u32) -> FieldElem {
        assert!(m >= 1, "ramification factor must be positive");
        if m == 1 {
            return self.clone();
        }
        if self.is_zero() {
            return FieldElem::zero_in(self.ram * m);
        }
        FieldElem {
            num: self.num.inflate(m as usize),
            shift: self.shift * m as i64,
            den: self.den.inflate(m as usize),
            ram: self.ram * m,
        }
    }

    /// Re-express with ramification `ram`, which must be a multiple of the current one.
    pub fn lift_to(&self, ram: u32) -> FieldElem {
        assert!(
            ram.is_multiple_of(self.ram),
            "cannot lift N={} to N={ram}",
            self.ram
        );
        self.ramify(ram / self.ram)
    }

    fn common(a: &FieldElem, b: &FieldElem) -> (FieldElem, FieldElem) {
        if a.ram == b.ram {
            return (a.clone(), b.clone());
        }
        let l = a.ram.lcm(&b.ram);
        (a.lift_to(l), b.lift_to(l))
    }

    fn add_impl(a: &FieldElem, b: &FieldElem) -> FieldElem {
        if a.ram != b.ram {
            let (a, b) = Self::common(a, b);
            return Self::add_impl(&a, &b);
        }
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        let s = a.shift.min(b.shift);
        let ua = (a.shift - s) as usize;
        let ub = (b.shift - s) as usize;
        if a.den == b.den {
            let num = a.num.shift_up(ua).add(&b.num.shift_up(ub));
            return Self::normalize(num, s, a.den.clone(), a.ram);
        }
        let num = a
            .num
            .mul(&b.den)
            .shift_up(ua)
            .add(&b.num.mul(&a.den).shift_up(ub));
        Self::normalize(num, s, a.den.mul(&b.den), a.ram)
    }

    fn mul_impl(a: &FieldElem, b: &FieldElem) -> FieldElem {
        if a.ram != b.ram {
            let (a, b) = Self::common(a, b);
            return Self::mul_impl(&a, &b);
        }
        if a.is_zero() || b.is_zero() {
            return FieldElem::zero_in(a.ram);
        }
        if a.den.is_one() && b.den.is_one() {
            return FieldElem {
                num: a.num.mul(&b.num),
                shift: a.shift + b.shift,
                den: Poly::one(),
                ram: a.ram,
            };
        }
        // Cross-cancel so that the product is reduced without a full gcd.
        let (an, bd) = cancel(&a.num, &b.den);
        let (bn, ad) = cancel(&b.num, &a.den);
        let num = an.mul(&bn);
        let den = ad.mul(&bd);
        let c = den.coeff(0);
        let (num, den) = if c.is_one() {
            (num, den)
        } else {
            let inv = Rat::one() / c;
            (num.scale(&inv), den.scale(&inv))
        };
        let k = num.ord().unwrap();
        FieldElem {
            num: num.shift_down(k),
            shift: a.shift + b.shift + k as i64,
            den,
            ram: a.ram,
        }
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(
            self.den.clone(),
            -self.shift,
            self.num.clone(),
            self.ram,
        ))
    }

    pub fn try_div(&self, other: &FieldElem) -> Result<FieldElem> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        let mut acc = FieldElem::one().lift_to(self.ram);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact text: Laurent monomials `c*u^k`, as `(num)/(den)` when the
    /// denominator is not one. Ramification is carried by the container.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str, ram: u32) -> Result<FieldElem> {
        let s = text.trim();
        if let Some(rest) = s.strip_prefix('(') {
            let split = rest
                .find(")/(")
                .ok_or_else(|| Error::Parse(format!("expected (num)/(den) in {s:?}")))?;
            let num = &rest[..split];
            let den = rest[split + 3..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {s:?}")))?;
            let (np, ns) = parse_laurent(num)?;
            let (dp, ds) = parse_laurent(den)?;
            FieldElem::from_parts(np, ns - ds, dp, ram)
        } else {
            let (p, sh) = parse_laurent(s)?;
            FieldElem::from_parts(p, sh, Poly::one(), ram)
        }
    }
}

fn cancel(a: &Poly, b: &Poly) -> (Poly, Poly) {
    if b.degree() == Some(0) || a.degree() == Some(0) {
        return (a.clone(), b.clone());
    }
    let g = a.gcd(b);
    if g.is_one() {
        (a.clone(), b.clone())
    } else {
        (a.div_rem(&g).0, b.div_rem(&g).0)
    }
}

fn write_laurent(f: &mut fmt::Formatter<'_>, p: &Poly, shift: i64) -> fmt::Result {
    let mut first = true;
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !first {
            f.write_str(" + ")?;
        }
        first = false;
        write!(f, "{c}*u^{}", i as i64 + shift)?;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Parse a sum of monomials into `(poly, shift)` with `poly(0) != 0`.
fn parse_laurent(s: &str) -> Result<(Poly, i64)> {
    let mut terms: Vec<(Rat, i64)> = Vec::new();
    for raw in s.split('+') {
        let term = raw.trim();
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        let (coeff, power) = match term.split_once('*') {
            Some((c, m)) => (parse_rat(c)?, parse_power(m)?),
            None if term.starts_with('u') => (Rat::one(), parse_power(term)?),
            None => (parse_rat(term)?, 0),
        };
        terms.push((coeff, power));
    }
    let nonzero: Vec<_> = terms.into_iter().filter(|(c, _)| !c.is_zero()).collect();
    let Some(low) = nonzero.iter().map(|(_, k)| *k).min() else {
        return Ok((Poly::zero(), 0));
    };
    let mut p = Poly::zero();
    for (c, k) in nonzero {
        p = p.add(&Poly::monomial(c, (k - low) as usize));
    }
    Ok((p, low))
}

fn parse_power(m: &str) -> Result<i64> {
    let m = m.trim();
    let rest = m
        .strip_prefix('u')
        .ok_or_else(|| Error::Parse(format!("expected u^k, got {m:?}")))?;
    if rest.is_empty() {
        return Ok(1);
    }
    rest.strip_prefix('^')
        .and_then(|e| e.trim().parse::<i64>().ok())
        .ok_or_else(|| Error::Parse(format!("bad exponent in {m:?}")))
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write_laurent(f, &self.num, self.shift)
        } else {
            f.write_str("(")?;
            write_laurent(f, &self.num, self.shift)?;
            f.write_str(")/(")?;
            write_laurent(f, &self.den, 0)?;
            f.write_str(")")
        }
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [N={}]", self.ram)
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        if self.ram == other.ram {
            self.shift == other.shift && self.num == other.num && self.den == other.den
        } else {
            let (a, b) = Self::common(self, other);
            a == b
        }
    }
}

impl Eq for FieldElem {}

impl From<Rat> for FieldElem {
    fn from(c: Rat) -> Self {
        FieldElem::from_rat(c)
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        FieldElem::add_impl(self, rhs)
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        FieldElem::add_impl(self, &-rhs)
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        FieldElem::mul_impl(self, rhs)
    }
}

impl Div for &FieldElem {
    type Output = FieldElem;
    fn div(self, rhs: &FieldElem) -> FieldElem {
        self.try_div(rhs).expect("division by zero field element")
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            num: self.num.neg(),
            shift: self.shift,
            den: self.den.clone(),
            ram: self.ram,
        }
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        &self + &rhs
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        &self - &rhs
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        &self * &rhs
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}
