//! Exact integer, rational and polynomial arithmetic.

mod bipoly;
mod division;
mod poly;
mod resultant;
mod roots;

pub use bipoly::BiPoly;
pub use division::{division_polynomial, DivisionPolynomials};
pub use poly::Poly;
pub use resultant::{content_valuation, content_valuation_bi, resultant, substitute_and_clear};
pub use roots::{divisors, rational_roots};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Parses `a`, `a/b`, or a decimal literal like `-4.8024` / `1.415e27`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{ip}{fp}").parse().map_err(|_| bad())?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// `num/den` rendering (just `num` for integers).
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter storing a rational as its [`format_rational`] string.
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Rounds `|q|` to `sig` significant digits and renders `d.ddde<exp>`.
pub fn rational_to_scientific(q: &BigRational, sig: u32) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let sig = sig.max(1);
    let neg = q.is_negative();
    let a = q.abs();
    let ten = BigInt::from(10);
    // estimate the decimal exponent, then fix it up
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(ten.pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), ten.pow((-k) as u32))
        }
    };
    while a >= pow10(e + 1) {
        e += 1;
    }
    while a < pow10(e) {
        e -= 1;
    }
    let scaled = &a / pow10(e - sig as i64 + 1);
    let mut m = scaled.round().to_integer();
    if m >= ten.pow(sig) {
        m /= &ten;
        e += 1;
    }
    let ms = m.to_string();
    let body = if ms.len() > 1 {
        format!("{}.{}", &ms[..1], &ms[1..])
    } else {
        ms
    };
    format!("{}{}e{}", if neg { "-" } else { "" }, body, e)
}

/// `v_p(n)`, or `None` for `n = 0`.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// `v_p(q)` for a nonzero rational.
pub fn rational_valuation(q: &BigRational, p: u64) -> Option<i64> {
    let vn = valuation(q.numer(), p)? as i64;
    let vd = valuation(q.denom(), p)? as i64;
    Some(vn - vd)
}

/// Serialized polynomial: variable names and `[exponents, numerator, denominator]` terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub variables: Vec<String>,
    pub terms: Vec<(Vec<u32>, String, String)>,
}

impl PolyRecord {
    pub(crate) fn term(exps: Vec<u32>, c: &BigRational) -> (Vec<u32>, String, String) {
        (exps, c.numer().to_string(), c.denom().to_string())
    }

    pub(crate) fn parse_coeff(n: &str, d: &str) -> Result<BigRational> {
        let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad numerator {n:?}")))?;
        let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad denominator {d:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(BigRational::new(n, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("-11/4").unwrap(), rat(-11, 4));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("-4.8024").unwrap(), rat(-48024, 10000));
        assert_eq!(parse_rational("1.415e3").unwrap(), rat(1415, 1));
        assert_eq!(parse_rational("5e-2").unwrap(), rat(1, 20));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn scientific_rendering() {
        assert_eq!(rational_to_scientific(&rat(362, 1), 3), "3.62e2");
        assert_eq!(rational_to_scientific(&rat(-1, 8), 2), "-1.3e-1");
        assert_eq!(rational_to_scientific(&rat(9999, 1), 2), "1.0e4");
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&int(242), 11), Some(2));
        assert_eq!(valuation(&int(0), 11), None);
        assert_eq!(rational_valuation(&rat(-33, 8), 2), Some(-3));
        assert_eq!(rational_valuation(&rat(-33, 8), 11), Some(1));
    }
}
