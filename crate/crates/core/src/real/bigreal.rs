//! Fixed-point arbitrary-precision reals.
//!
//! A [`BigReal`] is `mantissa * 2^-bits` where `bits` is derived from the
//! requested number of decimal digits plus a fixed guard. Precision is
//! absolute, not relative: a value near `1e-27` stored at 60 digits keeps
//! about 33 significant digits. Everything in this crate works with
//! quantities of moderate size, so that is the right trade.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard bits kept below the requested decimal precision.
pub const GUARD_BITS: u32 = 64;

/// Extra bits used inside transcendental functions.
const WORK_BITS: u32 = 32;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision in decimal digits. Always at least [`Precision::MIN`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Precision(u32);

impl Precision {
    pub const MIN: u32 = 20;
    pub const DEFAULT: Precision = Precision(60);

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN {
            return Err(Error::Precondition(format!(
                "precision must be at least {} digits, got {digits}",
                Self::MIN
            )));
        }
        Ok(Precision(digits))
    }

    pub fn digits(self) -> u32 {
        self.0
    }

    pub fn bits(self) -> u32 {
        (self.0 as f64 * LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// The precision obtained by multiplying the digit count by `factor`.
    pub fn scaled(self, factor: f64) -> Precision {
        Precision(((self.0 as f64) * factor).ceil() as u32)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl TryFrom<u32> for Precision {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        Precision::new(d)
    }
}

impl From<Precision> for u32 {
    fn from(p: Precision) -> u32 {
        p.0
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} digits", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigReal {
    mant: BigInt,
    prec: Precision,
}

// ---------------------------------------------------------------------------
// raw fixed-point helpers; all operate on mantissas sharing `bits`.

fn shr_round(a: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return a.clone();
    }
    let half = BigInt::one() << (k - 1);
    if a.is_negative() {
        -((-a + half) >> k)
    } else {
        (a + half) >> k
    }
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let twice = r.abs() << 1;
    if twice >= b.abs() {
        if a.is_negative() != b.is_negative() {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

fn rescale(a: &BigInt, from: u32, to: u32) -> BigInt {
    match from.cmp(&to) {
        Ordering::Equal => a.clone(),
        Ordering::Less => a << (to - from),
        Ordering::Greater => shr_round(a, from - to),
    }
}

fn fmul(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    shr_round(&(a * b), bits)
}

fn fdiv(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    div_round(&(a << bits), b)
}

fn fsqrt(a: &BigInt, bits: u32) -> BigInt {
    assert!(!a.is_negative(), "square root of a negative number");
    (a << bits).sqrt()
}

fn cached(table: &'static OnceLock<Mutex<HashMap<u32, BigInt>>>, bits: u32, f: fn(u32) -> BigInt) -> BigInt {
    let map = table.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().unwrap().get(&bits) {
        return v.clone();
    }
    let v = f(bits);
    map.lock().unwrap().insert(bits, v.clone());
    v
}

/// sum_{k>=0} (-1)^k / ((2k+1) n^(2k+1)) at `bits`, i.e. atan(1/n) (or atanh
/// with `alternate = false`).
fn arctan_inv(n: u64, bits: u32, alternate: bool) -> BigInt {
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut term = (BigInt::one() << bits) / &n;
    let mut sum = term.clone();
    let mut k: u64 = 1;
    while !term.is_zero() {
        term /= &n2;
        let t = &term / BigInt::from(2 * k + 1);
        if alternate && k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

fn pi_raw(bits: u32) -> BigInt {
    static PI: OnceLock<Mutex<HashMap<u32, BigInt>>> = OnceLock::new();
    cached(&PI, bits, |bits| {
        let wb = bits + WORK_BITS;
        let v = arctan_inv(5, wb, true) * 16 - arctan_inv(239, wb, true) * 4;
        shr_round(&v, WORK_BITS)
    })
}

fn ln2_raw(bits: u32) -> BigInt {
    static LN2: OnceLock<Mutex<HashMap<u32, BigInt>>> = OnceLock::new();
    cached(&LN2, bits, |bits| {
        let wb = bits + WORK_BITS;
        shr_round(&(arctan_inv(3, wb, false) * 2), WORK_BITS)
    })
}

fn exp_raw(x: &BigInt, bits: u32) -> BigInt {
    const HALVINGS: u32 = 12;
    let one = BigInt::one() << bits;
    let ln2 = ln2_raw(bits);
    let n = div_round(x, &ln2);
    let n_i = n.to_i64().expect("exponent out of range");
    let r = x - &n * &ln2;
    let r = shr_round(&r, HALVINGS);
    let mut sum = one.clone();
    let mut term = one;
    let mut k = 1u32;
    loop {
        term = fmul(&term, &r, bits) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..HALVINGS {
        sum = fmul(&sum, &sum, bits);
    }
    if n_i >= 0 {
        sum << (n_i as u32)
    } else {
        let s = (-n_i) as u64;
        if s > u32::MAX as u64 {
            BigInt::zero()
        } else {
            shr_round(&sum, s as u32)
        }
    }
}

fn ln_raw(x: &BigInt, bits: u32) -> BigInt {
    const ROOTS: u32 = 8;
    assert!(x.is_positive(), "logarithm of a non-positive number");
    // x = 2^e * m with m in [1, 2)
    let e = x.bits() as i64 - 1 - bits as i64;
    let mut m = if e >= 0 { x >> (e as u32) } else { x << ((-e) as u32) };
    for _ in 0..ROOTS {
        m = fsqrt(&m, bits);
    }
    let one = BigInt::one() << bits;
    let u = fdiv(&(&m - &one), &(&m + &one), bits);
    let u2 = fmul(&u, &u, bits);
    let mut sum = u.clone();
    let mut pow = u;
    let mut k: u64 = 1;
    loop {
        pow = fmul(&pow, &u2, bits);
        let t = &pow / BigInt::from(2 * k + 1);
        if t.is_zero() {
            break;
        }
        sum += t;
        k += 1;
    }
    (sum << (ROOTS + 1)) + ln2_raw(bits) * BigInt::from(e)
}

fn atan_raw(x: &BigInt, bits: u32) -> BigInt {
    const HALVINGS: u32 = 8;
    let one = BigInt::one() << bits;
    if x.abs() > one {
        let half_pi: BigInt = pi_raw(bits) >> 1u32;
        let inv = fdiv(&one, x, bits);
        let a = atan_raw(&inv, bits);
        return if x.is_negative() { -half_pi - a } else { half_pi - a };
    }
    let mut y = x.clone();
    for _ in 0..HALVINGS {
        let r = fsqrt(&(&one + fmul(&y, &y, bits)), bits);
        y = fdiv(&y, &(&one + r), bits);
    }
    let y2 = fmul(&y, &y, bits);
    let mut sum = y.clone();
    let mut pow = y;
    let mut k: u64 = 1;
    loop {
        pow = -fmul(&pow, &y2, bits);
        let t = &pow / BigInt::from(2 * k + 1);
        if t.is_zero() {
            break;
        }
        sum += t;
        k += 1;
    }
    sum << HALVINGS
}

fn sin_cos_raw(x: &BigInt, bits: u32) -> (BigInt, BigInt) {
    const HALVINGS: u32 = 10;
    let one = BigInt::one() << bits;
    let two_pi = pi_raw(bits) << 1;
    let k = div_round(x, &two_pi);
    let r = shr_round(&(x - k * two_pi), HALVINGS);
    let r2 = fmul(&r, &r, bits);
    // sin series and cos series
    let mut s = r.clone();
    let mut term = r;
    let mut n: u64 = 1;
    loop {
        term = -fmul(&term, &r2, bits) / BigInt::from((2 * n) * (2 * n + 1));
        if term.is_zero() {
            break;
        }
        s += &term;
        n += 1;
    }
    let mut c = one.clone();
    let mut term = one.clone();
    let mut n: u64 = 1;
    loop {
        term = -fmul(&term, &r2, bits) / BigInt::from((2 * n - 1) * (2 * n));
        if term.is_zero() {
            break;
        }
        c += &term;
        n += 1;
    }
    for _ in 0..HALVINGS {
        let s2 = fmul(&s, &c, bits) << 1;
        let c2 = &one - (fmul(&s, &s, bits) << 1);
        s = s2;
        c = c2;
    }
    (s, c)
}

// ---------------------------------------------------------------------------

impl BigReal {
    fn raw(mant: BigInt, prec: Precision) -> Self {
        BigReal { mant, prec }
    }

    pub fn zero(prec: Precision) -> Self {
        Self::raw(BigInt::zero(), prec)
    }

    pub fn one(prec: Precision) -> Self {
        Self::from_int(&BigInt::one(), prec)
    }

    pub fn from_int(n: &BigInt, prec: Precision) -> Self {
        Self::raw(n << prec.bits(), prec)
    }

    pub fn from_i64(n: i64, prec: Precision) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    pub fn from_rational(q: &BigRational, prec: Precision) -> Self {
        Self::raw(div_round(&(q.numer() << prec.bits()), q.denom()), prec)
    }

    /// Parses a decimal literal such as `-4.8024`, `1.415e27` or `7/2`.
    pub fn parse(s: &str, prec: Precision) -> Result<Self> {
        let q = crate::exact::parse_rational(s)?;
        Ok(Self::from_rational(&q, prec))
    }

    pub fn pi(prec: Precision) -> Self {
        Self::raw(pi_raw(prec.bits()), prec)
    }

    pub fn ln2(prec: Precision) -> Self {
        Self::raw(ln2_raw(prec.bits()), prec)
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn digits(&self) -> u32 {
        self.prec.digits()
    }

    fn bits(&self) -> u32 {
        self.prec.bits()
    }

    /// The same value carried at another precision.
    pub fn with_precision(&self, prec: Precision) -> Self {
        Self::raw(rescale(&self.mant, self.bits(), prec.bits()), prec)
    }

    /// Both operands at the lower of the two precisions.
    fn aligned(&self, other: &BigReal) -> (BigInt, BigInt, Precision) {
        let prec = self.prec.min(other.prec);
        let b = prec.bits();
        (
            rescale(&self.mant, self.bits(), b),
            rescale(&other.mant, other.bits(), b),
            prec,
        )
    }

    /// Runs `f` on the mantissa at extra working bits and rounds back.
    fn work<F: FnOnce(&BigInt, u32) -> BigInt>(&self, f: F) -> Self {
        let wb = self.bits() + WORK_BITS;
        let x = rescale(&self.mant, self.bits(), wb);
        let y = f(&x, wb);
        Self::raw(shr_round(&y, WORK_BITS), self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Self::raw(self.mant.abs(), self.prec)
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        Self::raw(&self.mant * n, self.prec)
    }

    pub fn div_int(&self, n: &BigInt) -> Self {
        Self::raw(div_round(&self.mant, n), self.prec)
    }

    pub fn mul_rational(&self, q: &BigRational) -> Self {
        Self::raw(div_round(&(&self.mant * q.numer()), q.denom()), self.prec)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one(self.prec);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative BigReal");
        Self::raw(fsqrt(&self.mant, self.bits()), self.prec)
    }

    pub fn exp(&self) -> Self {
        self.work(exp_raw)
    }

    /// Natural logarithm; panics on non-positive input.
    pub fn ln(&self) -> Self {
        self.work(ln_raw)
    }

    pub fn atan(&self) -> Self {
        self.work(atan_raw)
    }

    /// Arcsine on `[-1, 1]`; inputs a few ulps outside are clamped.
    pub fn asin(&self) -> Self {
        self.work(|x, bits| {
            let one = BigInt::one() << bits;
            let x = x.clone().clamp(-one.clone(), one.clone());
            let c = &one - fmul(&x, &x, bits);
            let c = if c.is_negative() { BigInt::zero() } else { c };
            let denom = &one + fsqrt(&c, bits);
            atan_raw(&fdiv(&x, &denom, bits), bits) << 1
        })
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let wb = self.bits() + WORK_BITS;
        let x = rescale(&self.mant, self.bits(), wb);
        let (s, c) = sin_cos_raw(&x, wb);
        (
            Self::raw(shr_round(&s, WORK_BITS), self.prec),
            Self::raw(shr_round(&c, WORK_BITS), self.prec),
        )
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        self.mant.div_floor(&(BigInt::one() << self.bits()))
    }

    pub fn round(&self) -> BigInt {
        shr_round(&self.mant, self.bits())
    }

    /// The exact dyadic rational this value stores.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mant.clone(), BigInt::one() << self.bits())
    }

    pub fn to_f64(&self) -> f64 {
        let len = self.mant.bits() as i64;
        let shift = (len - 64).max(0);
        let top = (&self.mant >> (shift as u32)).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi((shift - self.bits() as i64) as i32)
    }

    /// An absolute error radius `10^-(digits - slack)`.
    pub fn ulp_radius(prec: Precision, slack: u32) -> BigRational {
        let e = prec.digits().saturating_sub(slack);
        BigRational::new(BigInt::one(), BigInt::from(10u32).pow(e))
    }

    /// True when `|self - other| <= 10^-digits * max(1, |self|)`.
    pub fn agrees_with(&self, other: &BigReal, digits: u32) -> bool {
        let diff = (self - other).abs().to_rational();
        let scale = {
            let a = self.abs().to_rational();
            if a > BigRational::one() {
                a
            } else {
                BigRational::one()
            }
        };
        diff * BigRational::from_integer(BigInt::from(10u32).pow(digits)) <= scale
    }

    /// Fixed-point decimal rendering with `frac_digits` digits after the point.
    pub fn to_decimal(&self, frac_digits: u32) -> String {
        let scaled = div_round(
            &(&self.mant * BigInt::from(10u32).pow(frac_digits)),
            &(BigInt::one() << self.bits()),
        );
        let neg = scaled.is_negative();
        let mut s = scaled.abs().to_string();
        let fd = frac_digits as usize;
        if fd > 0 {
            if s.len() <= fd {
                s = format!("{}{}", "0".repeat(fd + 1 - s.len()), s);
            }
            s.insert(s.len() - fd, '.');
        }
        if neg {
            s.insert(0, '-');
        }
        s
    }

    /// Scientific rendering with `sig` significant digits, e.g. `3.62e25`.
    pub fn to_scientific(&self, sig: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let q = self.to_rational();
        crate::exact::rational_to_scientific(&q, sig)
    }

    pub fn to_record(&self) -> DecimalReal {
        DecimalReal {
            digits: self.digits(),
            value: self.to_decimal(self.digits()),
        }
    }

    pub fn from_record(r: &DecimalReal) -> Result<Self> {
        Self::parse(&r.value, Precision::new(r.digits)?)
    }
}

/// Serialized form of a [`BigReal`]: a decimal string and its digit count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalReal {
    pub digits: u32,
    pub value: String,
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().map(|p| p as u32).unwrap_or(self.digits());
        f.write_str(&self.to_decimal(d))
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (a, b, _) = self.aligned(other);
        Some(a.cmp(&b))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                let (a, b, prec) = self.aligned(rhs);
                let f: fn(BigInt, BigInt, u32) -> BigInt = $body;
                BigReal::raw(f(a, b, prec.bits()), prec)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                (&self).$m(rhs)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b, _| a + b);
binop!(Sub, sub, |a, b, _| a - b);
binop!(Mul, mul, |a, b, bits| fmul(&a, &b, bits));
binop!(Div, div, |a, b, bits| {
    assert!(!b.is_zero(), "BigReal division by zero");
    fdiv(&a, &b, bits)
});

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::raw(-self.mant, self.prec)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::raw(-&self.mant, self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    const PI_50: &str = "3.14159265358979323846264338327950288419716939937511";
    const E_50: &str = "2.71828182845904523536028747135266249775724709369996";
    const LN2_50: &str = "0.69314718055994530941723212145817656807550013436026";

    #[test]
    fn constants_to_fifty_digits() {
        assert_eq!(BigReal::pi(p(50)).to_decimal(50), PI_50);
        assert_eq!(BigReal::ln2(p(50)).to_decimal(50), LN2_50);
        assert_eq!(BigReal::one(p(50)).exp().to_decimal(50), E_50);
    }

    #[test]
    fn precision_floor_is_enforced() {
        assert!(Precision::new(19).is_err());
        assert!(Precision::new(20).is_ok());
    }

    #[test]
    fn exp_ln_round_trip() {
        let pr = p(60);
        for s in ["0.001", "0.5", "1", "13.56", "-5.16", "123.25", "1e-30"] {
            let x = BigReal::parse(s, pr).unwrap();
            let back = x.exp().ln();
            assert!(back.agrees_with(&x, 55), "{s}: {back}");
        }
        let big = BigReal::parse("1.415e27", pr).unwrap();
        assert!(big.ln().exp().agrees_with(&big, 55));
    }

    #[test]
    fn atan_asin_sin_cos_identities() {
        let pr = p(60);
        let pi = BigReal::pi(pr);
        let one = BigReal::one(pr);
        let quarter = pi.div_int(&BigInt::from(4));
        assert!(one.atan().agrees_with(&quarter, 58));
        assert!(one.asin().agrees_with(&(pi.div_int(&BigInt::from(2))), 58));
        let x = BigReal::parse("0.3", pr).unwrap();
        let (s, c) = x.sin_cos();
        assert!((&s * &s + &c * &c).agrees_with(&one, 58));
        assert!(s.asin().agrees_with(&x, 55));
        let (s6, _) = pi.div_int(&BigInt::from(6)).sin_cos();
        assert!(s6.agrees_with(&BigReal::parse("0.5", pr).unwrap(), 58));
        let big = BigReal::parse("-7.5", pr).unwrap();
        assert!(big.atan().agrees_with(&-(BigReal::parse("7.5", pr).unwrap().atan()), 58));
    }

    #[test]
    fn sqrt_and_division() {
        let pr = p(40);
        let two = BigReal::from_i64(2, pr);
        let r = two.sqrt();
        assert_eq!(r.to_decimal(40), "1.4142135623730950488016887242096980785697");
        assert!((&r * &r).agrees_with(&two, 39));
        let third = BigReal::one(pr) / BigReal::from_i64(3, pr);
        assert_eq!(third.to_decimal(10), "0.3333333333");
    }

    #[test]
    fn mixed_precision_takes_minimum() {
        let a = BigReal::one(p(30));
        let b = BigReal::one(p(80));
        assert_eq!((&a + &b).digits(), 30);
    }

    #[test]
    fn decimal_rendering() {
        let pr = p(20);
        assert_eq!(BigReal::parse("-0.015", pr).unwrap().to_decimal(3), "-0.015");
        assert_eq!(BigReal::parse("4.8024", pr).unwrap().to_decimal(2), "4.80");
        assert_eq!(BigReal::parse("3.62e25", pr).unwrap().to_scientific(3), "3.62e25");
        assert_eq!(BigReal::parse("-2.5", pr).unwrap().floor(), BigInt::from(-3));
    }

    #[test]
    fn record_round_trip() {
        let x = BigReal::pi(p(30));
        let back = BigReal::from_record(&x.to_record()).unwrap();
        assert!(back.agrees_with(&x, 30));
    }
}
