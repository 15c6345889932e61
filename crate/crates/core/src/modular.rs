//! The j-map `j(X, Y) = h(X, Y)/(XY - 11)^11` of the curve viewed as the
//! non-split Cartan modular curve of level 11, and the exact checks showing
//! that `j(P)` is integral exactly when `x/(xy - 11)` is.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Check};
use crate::curve::{k_is_integral, RationalPoint, WeierstrassModel};
use crate::error::{domain, Result};
use crate::exact::{
    content_valuation, content_valuation_bi, format_rational, rat, rat_int, resultant, substitute_and_clear,
    valuation, BiPoly, Poly,
};
use crate::linear_forms::integral_points;

/// Exponent of `XY - 11` in the denominator.
pub const DENOMINATOR_EXPONENT: u32 = 11;
/// Degree of the j-map.
pub const MAP_DEGREE: u32 = 55;

/// Coefficients of the `Y` part of the last factor, from `X^0` up.
const G_Y: [i64; 9] = [
    117523307, 362189058, 474292533, 341425458, 145636931, 36807958, 5159935, 337590, 6750,
];
/// Coefficients of the `Y`-free part of the last factor, from `X^0` up.
const G_0: [i64; 10] = [
    1288408000, 4320837279, 6299026712, 5217583888, 2692703508, 892661770, 188870352, 24440064, 1746052,
    51975,
];

/// The numerator `h` of the j-map, expanded from its factored form.
#[derive(Clone, Debug)]
pub struct JMapData {
    pub h: BiPoly,
    /// The last factor of `h`, linear in `Y`.
    pub g: BiPoly,
    pub denominator_exponent: u32,
}

impl JMapData {
    /// Expands `(X^2 + 11X + 22)^3 ((11X^2 + 88X + 121)Y + 2X^4 + 55X^3 + 451X^2
    /// + 1452X + 1452)^3 G(X, Y)`.
    pub fn new() -> Result<Self> {
        let f1 = BiPoly::from_x_poly(&Poly::from_ints(&[22, 11, 1]));
        let f2 = BiPoly::from_y_coeffs(&[
            Poly::from_ints(&[1452, 1452, 451, 55, 2]),
            Poly::from_ints(&[121, 88, 11]),
        ]);
        let g = BiPoly::from_y_coeffs(&[Poly::from_ints(&G_0), Poly::from_ints(&G_Y)]);
        let h = &(&f1.pow(3) * &f2.pow(3)) * &g;
        if !h.is_integral() || h.degree_y() != Some(4) {
            return Err(domain("numerator of the j-map is malformed"));
        }
        Ok(JMapData {
            h,
            g,
            denominator_exponent: DENOMINATOR_EXPONENT,
        })
    }

    /// `X^4 h(X, 11/X)`, the numerator restricted to the cusps' curve `XY = 11`.
    pub fn r_polynomial(&self) -> Result<Poly> {
        substitute_and_clear(&self.h, &rat(11, 1), 4)
    }

    /// `j(P)`. At infinity, with `x ~ u^-2` and `y ~ u^-3`, both numerator and
    /// denominator have a pole of order 55 and the value is the ratio of the
    /// top weighted forms at `(1, 1)`.
    pub fn j_map(&self, p: &RationalPoint) -> Result<BigRational> {
        let model = WeierstrassModel::xns11();
        if !model.contains(p) {
            return Err(domain(format!("point {p} is not on the curve")));
        }
        match p {
            RationalPoint::Infinity => {
                let (w, top) = self
                    .h
                    .top_weighted(2, 3)
                    .ok_or_else(|| domain("empty numerator"))?;
                if w != MAP_DEGREE {
                    return Err(domain(format!("numerator has weight {w}, not {MAP_DEGREE}")));
                }
                let one = BigRational::one();
                Ok(top.eval(&one, &one))
            }
            RationalPoint::Affine { x, y } => {
                let den = x * y - rat(11, 1);
                if den.is_zero() {
                    return Err(domain("xy = 11: j has a pole"));
                }
                Ok(self.h.eval(x, y) / Pow::pow(den, self.denominator_exponent))
            }
        }
    }
}

/// The shared expanded numerator.
pub fn jmap_data() -> &'static JMapData {
    static DATA: OnceLock<JMapData> = OnceLock::new();
    DATA.get_or_init(|| JMapData::new().expect("fixed numerator is well formed"))
}

/// `j(P)` with the shared numerator.
pub fn j_map(p: &RationalPoint) -> Result<BigRational> {
    jmap_data().j_map(p)
}

/// One CM j-invariant and its discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmEntry {
    pub discriminant: i64,
    /// Closed form such as `-5280^3`.
    pub form: String,
    /// Decimal string of the value.
    pub j: String,
}

/// The seven CM j-invariants, in the order of the seven points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmTable {
    pub entries: Vec<CmEntry>,
}

impl Default for CmTable {
    fn default() -> Self {
        let cube = |c: i64, b: i64| BigInt::from(c) * BigInt::from(b).pow(3u32);
        let e = |d: i64, form: &str, j: BigInt| CmEntry {
            discriminant: d,
            form: form.into(),
            j: j.to_string(),
        };
        CmTable {
            entries: vec![
                e(-67, "-5280^3", cube(-1, 5280)),
                e(-16, "66^3", cube(1, 66)),
                e(-4, "12^3", cube(1, 12)),
                e(-27, "-3*160^3", cube(-3, 160)),
                e(-163, "-640320^3", cube(-1, 640320)),
                e(-3, "0", BigInt::zero()),
                e(-12, "2*30^3", cube(2, 30)),
            ],
        }
    }
}

impl CmTable {
    pub fn values(&self) -> Vec<BigInt> {
        self.entries.iter().map(|e| e.j.parse().expect("decimal")).collect()
    }
}

/// The seven points map to the CM table, in order, with distinct values.
pub fn verify_cm_values() -> Result<Certificate> {
    let mut cert = Certificate::new("CM j-invariants");
    let table = CmTable::default();
    let pts = integral_points();
    let js: Vec<BigRational> = pts.iter().map(j_map).collect::<Result<_>>()?;
    for ((p, j), e) in pts.iter().zip(&js).zip(&table.entries) {
        cert.push(Check::exact(format!("j{p} (D = {})", e.discriminant), format_rational(j), &e.j));
    }
    let mut distinct: Vec<&BigRational> = js.iter().collect();
    distinct.sort();
    distinct.dedup();
    cert.push(Check::exact("distinct j-values", distinct.len(), 7));
    let curve_j = WeierstrassModel::xns11().j_invariant();
    cert.record("j of the model", format_rational(&curve_j));
    Ok(cert)
}

/// `deg r = 31` and `|res(p, r)| = 11^63`, with the sign recorded and the
/// product rule `res(p, X r) = res(p, X) res(p, r)` cross-checked.
pub fn verify_resultant_check() -> Result<Certificate> {
    let mut cert = Certificate::new("resultant check");
    let data = jmap_data();
    let r = data.r_polynomial()?;
    let p = WeierstrassModel::xns11().cusp_polynomial();
    cert.push(Check::exact("deg r", r.degree().map(|d| d as i64).unwrap_or(-1), 31));
    let eleven63 = BigInt::from(11).pow(63u32);
    let (res, res_xr) = crate::par::join(|| resultant(&p, &r), || resultant(&p, &(&Poly::x() * &r)));
    let (res, res_xr) = (res?, res_xr?);
    cert.push(Check::exact("|res(p, r)|", res.abs(), &eleven63));
    cert.record("sign of res(p, r)", if res.is_negative() { "-" } else { "+" });
    let res_x = resultant(&p, &Poly::x())?;
    cert.record("res(p, X)", &res_x);
    cert.push(Check::exact("res(p, X r)", &res_xr, &res_x * &res));
    let content = r
        .integer_coeffs()
        .ok_or_else(|| domain("r has non-integral coefficients"))?
        .iter()
        .fold(BigInt::zero(), |g, c| g.gcd(c));
    cert.record("content of r", &content);
    cert.record("v_11 content of r", content_valuation(&r, 11)?);
    Ok(cert)
}

/// `11^14` divides `h(11U, 11V)` while `(xy - 11)^11` is divisible by exactly
/// `11^11` when `11 | x` and `11 | y`, leaving a margin of `11^3`.
pub fn verify_eleven_adic_check() -> Result<Certificate> {
    let mut cert = Certificate::new("11-adic check");
    let eleven = rat(11, 1);
    let scaled = jmap_data().h.scale_vars(&eleven, &eleven);
    let v = content_valuation_bi(&scaled, 11)?;
    cert.push(Check::compare_exact(
        "v_11 content of h(11U, 11V)",
        &rat(v as i64, 1),
        ">=",
        &rat(14, 1),
    ));
    cert.record("v_11 content of h(11U, 11V)", v);
    let mut exact = true;
    for a in -20i64..=20 {
        for b in -20i64..=20 {
            let d = BigInt::from(121 * a * b - 11).pow(DENOMINATOR_EXPONENT);
            exact &= valuation(&d, 11) == Some(DENOMINATOR_EXPONENT);
        }
    }
    cert.push(Check::flag("v_11((121ab - 11)^11) = 11 for |a|, |b| <= 20", exact, exact));
    let margin = v as i64 - DENOMINATOR_EXPONENT as i64;
    cert.push(Check::compare_exact("11-adic margin", &rat(margin, 1), ">=", &rat(3, 1)));
    Ok(cert)
}

/// Primes dividing `n`, by trial division; `n` must be small enough.
fn prime_factors(n: &BigInt) -> Option<Vec<BigInt>> {
    let mut n = n.abs();
    let mut out = vec![];
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1u64 << 32);
    while &d * &d <= n {
        if d > limit {
            return None;
        }
        if (&n % &d).is_zero() {
            out.push(d.clone());
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    Some(out)
}

/// For each point, `j(P)` is integral exactly when `x/(xy - 11)` is; also
/// checks that the primes of the denominator of `j` divide `rs - 11 t^5` for
/// `x = r/t^2`, `y = s/t^3`.
pub fn verify_integrality_equivalence(points: &[RationalPoint]) -> Result<Certificate> {
    let mut cert = Certificate::new("integrality equivalence");
    let rows = crate::par::map(points, |p| -> Result<(bool, bool, Option<bool>)> {
        let j = j_map(p)?;
        let k = k_is_integral(p)?;
        let primes_ok = match p.weighted_form() {
            None => None,
            Some((r, s, t)) => {
                let w = &r * &s - BigInt::from(11) * t.pow(5u32);
                // denominators of j too large to factor are checked by gcd only
                let den = j.denom().clone();
                Some(match prime_factors(&den) {
                    Some(ps) => ps.iter().all(|q| (&w % q).is_zero()),
                    None => !den.gcd(&w).is_one(),
                })
            }
        };
        Ok((j.is_integer(), k, primes_ok))
    });
    for (p, row) in points.iter().zip(rows) {
        let (j_int, k_int, primes) = row?;
        cert.push(Check::flag(
            format!("{p}: j integral iff k integral"),
            j_int == k_int,
            format!("j integral {j_int}, k integral {k_int}"),
        ));
        if let Some(ok) = primes {
            cert.push(Check::flag(format!("{p}: den j divides a power of rs - 11t^5"), ok, ok));
        }
    }
    Ok(cert)
}

/// `m P0` for `|m| <= bound`.
pub fn multiples_of_p0(bound: i64) -> Result<Vec<RationalPoint>> {
    let model = WeierstrassModel::xns11();
    (-bound..=bound).map(|m| model.mul(m, &RationalPoint::p0())).collect()
}

/// Everything needed for the equivalence theorem: CM values, the resultant,
/// the 11-adic margin and the equivalence on `m P0`, `|m| <= bound`.
pub fn certify_equivalence_theorem(bound: i64) -> Result<Certificate> {
    let mut cert = Certificate::new("integral j-invariants");
    let pts = multiples_of_p0(bound)?;
    let (a, b) = crate::par::join(
        || (verify_cm_values(), verify_resultant_check()),
        || (verify_eleven_adic_check(), verify_integrality_equivalence(&pts)),
    );
    cert.absorb("cm", &a.0?);
    cert.absorb("resultant", &a.1?);
    cert.absorb("11-adic", &b.0?);
    cert.absorb("equivalence", &b.1?);
    cert.record("multiples bound", bound);
    Ok(cert)
}

/// `j(P)` rendered together with the CM discriminant when it is in the table.
pub fn describe_j(j: &BigRational) -> (String, Option<i64>) {
    let table = CmTable::default();
    let d = table
        .entries
        .iter()
        .find(|e| rat_int(&e.j.parse().expect("decimal")) == *j)
        .map(|e| e.discriminant);
    (format_rational(j), d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_points_give_cm_values() {
        let c = verify_cm_values().unwrap();
        assert!(c.passed, "{:?}", c.failures().collect::<Vec<_>>());
        assert_eq!(j_map(&RationalPoint::Infinity).unwrap(), rat(54000, 1));
    }

    #[test]
    fn resultant_and_eleven_adic() {
        let c = verify_resultant_check().unwrap();
        assert!(c.passed, "{:?}", c.failures().collect::<Vec<_>>());
        assert_eq!(c.values["sign of res(p, r)"], "+");
        assert_eq!(c.values["res(p, X)"], "121");
        assert_eq!(c.values["content of r"], "11");
        let e = verify_eleven_adic_check().unwrap();
        assert!(e.passed);
        assert_eq!(e.values["v_11 content of h(11U, 11V)"], "14");
    }

    #[test]
    fn equivalence_on_multiples() {
        let c = verify_integrality_equivalence(&multiples_of_p0(12).unwrap()).unwrap();
        assert!(c.passed, "{:?}", c.failures().collect::<Vec<_>>());
        let five = WeierstrassModel::xns11().mul(5, &RationalPoint::p0()).unwrap();
        assert!(!j_map(&five).unwrap().is_integer());
        assert!(j_map(&RationalPoint::affine(rat(1, 1), rat(1, 1))).is_err());
    }
}
