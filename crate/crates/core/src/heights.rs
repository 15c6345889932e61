//! Naive heights, the canonical height and the comparison
//! `h_hat <= h_t / 3 + 4.52`.
//!
//! The canonical height uses the Silverman normalization (half of PARI's) and
//! is computed by local decomposition: for a point `Q` with nonsingular
//! reduction everywhere on a minimal model, `h_hat(Q)` is the archimedean
//! local height from Tate's series plus `1/2 log den(x(Q))`. A general point
//! is first multiplied into that subgroup.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::certificate::{Certificate, Check};
use crate::curve::{t_value, RationalPoint, WeierstrassModel};
use crate::error::{domain, Error, Result};
use crate::exact::{rat, valuation, Poly};
use crate::real::{real_roots, BigReal, DecimalReal, Precision};

/// Silverman's difference bound for the default model, `h_hat <= h_X/2 + 3.54`.
pub const SILVERMAN_CONSTANT: &str = "3.54";
/// The constant of the combined bound, `h_hat <= h_t/3 + 4.52`.
pub const COMBINED_CONSTANT: &str = "4.52";
/// Largest multiplier tried when moving a point into the identity component.
const MAX_COMPONENT_MULTIPLIER: i64 = 24;

/// The function whose naive height is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HeightFunction {
    X,
    T,
}

/// `log` of the height of the rational `q = a/b` in lowest terms,
/// `log max(|a|, |b|)`.
pub fn log_height_of_rational(q: &BigRational, prec: Precision) -> BigReal {
    let m = q.numer().abs().max(q.denom().clone());
    BigReal::from_int(&m, prec).ln()
}

/// `h_f(P) = log H_f(P)`; fails at a pole of `f`.
pub fn naive_height(p: &RationalPoint, f: HeightFunction, prec: Precision) -> Result<BigReal> {
    let v = match f {
        HeightFunction::X => p.x().cloned(),
        HeightFunction::T => t_value(p),
    }
    .ok_or_else(|| domain(format!("{p} is a pole of {f:?}")))?;
    Ok(log_height_of_rational(&v, prec))
}

/// The canonical height with a rigorous truncation bound.
#[derive(Clone, Debug)]
pub struct CanonicalHeight {
    pub value: BigReal,
    /// Bound on `|value - h_hat(P)|` from series truncation and rounding.
    pub error_bound: BigReal,
    /// `m` such that `mP` has nonsingular reduction at every prime.
    pub multiplier: i64,
}

/// Archimedean data for Tate's series on the shifted model `x' = x + r` with
/// every real point at `x' >= 1`.
#[derive(Clone, Debug)]
pub struct TateSeries {
    shift: BigInt,
    b: [BigRational; 4],
    /// Upper bound for `|log z(t)|` over `t` in `[0, 1/x'_min]`.
    sup_log_z: f64,
}

impl TateSeries {
    pub fn new(model: &WeierstrassModel) -> Result<Self> {
        let q = model.completed_square_cubic();
        let low = Precision::new(30)?;
        let roots = real_roots(&q, low)?;
        let e_max = roots
            .iter()
            .map(|r| r.hi.clone())
            .max()
            .ok_or_else(|| domain("cubic without real roots"))?;
        // smallest integer r with e_max + r >= 1
        let shift = (BigRational::one() - &e_max).ceil().to_integer();
        let r0 = BigRational::from_integer(-shift.clone());
        let [b2, b4, b6, b8] = model.b_invariants().map(BigRational::from_integer);
        // b-invariants after x = x' + r0
        let c3 = rat(3, 1);
        let nb2 = &b2 + rat(12, 1) * &r0;
        let nb4 = &b4 + &r0 * &b2 + rat(6, 1) * &r0 * &r0;
        let nb6 = &b6 + rat(2, 1) * &r0 * &b4 + &r0 * &r0 * &b2 + rat(4, 1) * &r0 * &r0 * &r0;
        let nb8 = &b8 + &c3 * &r0 * &b6 + &c3 * &r0 * &r0 * &b4 + &r0 * &r0 * &r0 * &b2
            + &c3 * &r0 * &r0 * &r0 * &r0;
        let b = [nb2, nb4, nb6, nb8];
        let t_max = (&e_max + BigRational::from_integer(shift.clone())).recip();
        let sup_log_z = sup_abs_log_z(&b, &t_max)?;
        Ok(TateSeries { shift, b, sup_log_z })
    }

    /// `z(t) = 1 - b4 t^2 - 2 b6 t^3 - b8 t^4`.
    fn z_poly(b: &[BigRational; 4]) -> Poly {
        Poly::new(vec![
            BigRational::one(),
            BigRational::zero(),
            -b[1].clone(),
            -(rat(2, 1) * &b[2]),
            -b[3].clone(),
        ])
    }

    /// Number of series terms so the tail is below `10^-digits`.
    fn terms_for(&self, digits: u32) -> u32 {
        let need = digits as f64 * std::f64::consts::LOG2_10 + (self.sup_log_z / 6.0).max(1.0).log2();
        (need / 2.0).ceil() as u32 + 2
    }

    /// Tail bound `4^-N / 6 * sup |log z|` after `N` terms.
    fn tail_bound(&self, n: u32, prec: Precision) -> BigReal {
        let sup = BigReal::from_rational(
            &BigRational::from_float(self.sup_log_z * 1.01 + 1e-12).expect("finite"),
            prec,
        );
        (sup.div_int(&BigInt::from(6))).div_int(&(BigInt::one() << (2 * n)))
    }

    /// The archimedean local height at a real abscissa `x`.
    pub fn lambda_infinity(&self, x: &BigRational, prec: Precision) -> Result<(BigReal, BigReal)> {
        let xs = x + BigRational::from_integer(self.shift.clone());
        if xs < BigRational::one() {
            return Err(domain("abscissa left of the shifted real locus"));
        }
        let work = Precision::new(prec.digits() + 10)?;
        let [b2, b4, b6, b8] = self.b.clone().map(|c| BigReal::from_rational(&c, work));
        let n = self.terms_for(prec.digits() + 2);
        let mut t = BigReal::from_rational(&xs.recip(), work);
        let mut sum = BigReal::zero(work);
        let two = BigInt::from(2);
        for k in 0..n {
            let t2 = &t * &t;
            let t3 = &t2 * &t;
            let t4 = &t3 * &t;
            let w = t.mul_int(&BigInt::from(4)) + &b2 * &t2 + (&b4 * &t3).mul_int(&two) + &b6 * &t4;
            let z = BigReal::one(work) - &b4 * &t2 - (&b6 * &t3).mul_int(&two) - &b8 * &t4;
            if !z.is_positive() {
                return Err(Error::InsufficientPrecision("Tate series left its domain".into()));
            }
            sum = sum + z.ln().div_int(&(BigInt::one() << (2 * k)));
            t = w / z;
        }
        let half_log_x = BigReal::from_rational(&xs, work).ln().div_int(&two);
        let value = half_log_x + sum.div_int(&BigInt::from(8));
        let err = self.tail_bound(n, work) + BigReal::from_rational(&BigReal::ulp_radius(prec, 2), work);
        Ok((value.with_precision(prec), err.with_precision(prec)))
    }
}

/// `max |log z(t)|` over `[0, t_max]` from the endpoints and critical points.
fn sup_abs_log_z(b: &[BigRational; 4], t_max: &BigRational) -> Result<f64> {
    let z = TateSeries::z_poly(b);
    let mut cands = vec![BigRational::zero(), t_max.clone()];
    let low = Precision::new(30)?;
    for r in real_roots(&z.derivative(), low)? {
        let v = r.midpoint();
        if v > BigRational::zero() && &v < t_max {
            cands.push(v);
        }
    }
    let mut sup = 0f64;
    for c in cands {
        let v = z.eval(&c).to_f64().unwrap_or(f64::NAN);
        if !(v > 0.0) {
            return Err(domain("z(t) is not positive on the real locus"));
        }
        sup = sup.max(v.ln().abs());
    }
    Ok(sup)
}

fn rat_int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// True when `p` reduces to a nonsingular point of the minimal model mod `prime`.
pub fn has_nonsingular_reduction(model: &WeierstrassModel, p: &RationalPoint, prime: u64) -> bool {
    let (x, y) = match (p.x(), p.y()) {
        (Some(x), Some(y)) => (x, y),
        _ => return true,
    };
    if valuation(x.denom(), prime).unwrap_or(0) > 0 {
        return true;
    }
    let [a1, a2, a3, a4, _] = model.coefficients().clone().map(|c| rat_int(&c));
    let fx = &a1 * y - rat(3, 1) * x * x - rat(2, 1) * &a2 * x - &a4;
    let fy = rat(2, 1) * y + &a1 * x + &a3;
    let divisible = |v: &BigRational| v.is_zero() || valuation(v.numer(), prime).unwrap_or(0) > 0;
    !(divisible(&fx) && divisible(&fy))
}

/// Primes dividing the discriminant (trial division; fine for small models).
pub fn bad_primes(model: &WeierstrassModel) -> Vec<u64> {
    let mut d = model.discriminant().abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= d {
        if (&d % &p).is_zero() {
            out.push(p.to_u64().expect("small prime"));
            while (&d % &p).is_zero() {
                d /= &p;
            }
        }
        p += 1;
    }
    if d > BigInt::one() {
        out.push(d.to_u64().expect("discriminant factor fits in u64"));
    }
    out
}

/// `h_hat(P)` for a model with one real component.
pub fn canonical_height(model: &WeierstrassModel, p: &RationalPoint, prec: Precision) -> Result<CanonicalHeight> {
    let series = TateSeries::new(model)?;
    canonical_height_with(model, &series, p, prec)
}

/// Same as [`canonical_height`] with a precomputed series.
pub fn canonical_height_with(
    model: &WeierstrassModel,
    series: &TateSeries,
    p: &RationalPoint,
    prec: Precision,
) -> Result<CanonicalHeight> {
    if !model.contains(p) {
        return Err(domain(format!("point {p} is not on the curve")));
    }
    if p.is_infinity() {
        return Ok(CanonicalHeight {
            value: BigReal::zero(prec),
            error_bound: BigReal::zero(prec),
            multiplier: 1,
        });
    }
    let primes = bad_primes(model);
    let mut found = None;
    for m in 1..=MAX_COMPONENT_MULTIPLIER {
        let q = model.mul(m, p)?;
        if q.is_infinity() {
            // torsion
            return Ok(CanonicalHeight {
                value: BigReal::zero(prec),
                error_bound: BigReal::zero(prec),
                multiplier: m,
            });
        }
        if primes.iter().all(|&l| has_nonsingular_reduction(model, &q, l)) {
            found = Some((m, q));
            break;
        }
    }
    let (m, q) = found.ok_or_else(|| Error::Unsupported("no small multiple in the identity component".into()))?;
    let x = q.x().expect("affine");
    let (arch, err) = series.lambda_infinity(x, prec)?;
    let non_arch = BigReal::from_int(x.denom(), prec).ln().div_int(&BigInt::from(2));
    let m2 = BigInt::from(m * m);
    Ok(CanonicalHeight {
        value: (arch + non_arch).div_int(&m2),
        error_bound: err.div_int(&m2),
        multiplier: m,
    })
}

/// Heights of one point as recorded in certificates.
#[derive(Clone, Debug, Serialize)]
pub struct HeightReport {
    pub point: RationalPoint,
    pub h_x: Option<DecimalReal>,
    pub h_t: Option<DecimalReal>,
    pub h_hat: DecimalReal,
    pub error_bound: String,
}

pub fn height_report(model: &WeierstrassModel, p: &RationalPoint, prec: Precision) -> Result<HeightReport> {
    let h = canonical_height(model, p, prec)?;
    Ok(HeightReport {
        point: p.clone(),
        h_x: naive_height(p, HeightFunction::X, prec).ok().map(|v| v.to_record()),
        h_t: naive_height(p, HeightFunction::T, prec).ok().map(|v| v.to_record()),
        h_hat: h.value.to_record(),
        error_bound: h.error_bound.to_scientific(3),
    })
}

/// `max(1, |x|_p) <= max(1, |t|_p)^(2/3)` at `prime`, checked exactly.
pub fn nonarchimedean_bound_holds(p: &RationalPoint, prime: u64) -> Option<bool> {
    let x = p.x()?;
    let t = t_value(p)?;
    let neg = |q: &BigRational| -> i64 {
        if q.is_zero() {
            return 0;
        }
        let vn = valuation(q.numer(), prime).unwrap_or(0) as i64;
        let vd = valuation(q.denom(), prime).unwrap_or(0) as i64;
        (vd - vn).max(0)
    };
    Some(3 * neg(x) <= 2 * neg(&t))
}

/// Checks the chain `h_X <= 2/3 h_t + log 7`, `h_hat <= h_X/2 + 3.54` and
/// `h_hat <= h_t/3 + 4.52` on each point; poles of `t` are skipped.
pub fn verify_height_comparison(
    model: &WeierstrassModel,
    points: &[RationalPoint],
    prec: Precision,
) -> Result<Certificate> {
    let mut cert = Certificate::new("height comparison").with_precision(prec.digits());
    let series = TateSeries::new(model)?;
    let silverman = BigReal::parse(SILVERMAN_CONSTANT, prec)?;
    let combined = BigReal::parse(COMBINED_CONSTANT, prec)?;
    let log7 = BigReal::from_i64(7, prec).ln();
    cert.record("silverman constant", SILVERMAN_CONSTANT);
    cert.record("combined constant", COMBINED_CONSTANT);
    let rows = crate::par::map(points, |p| -> Result<Option<(BigReal, BigReal, BigReal)>> {
        if t_value(p).is_none_or(|t| t.is_zero()) {
            return Ok(None);
        }
        let hx = naive_height(p, HeightFunction::X, prec)?;
        let ht = naive_height(p, HeightFunction::T, prec)?;
        let hh = canonical_height_with(model, &series, p, prec)?;
        Ok(Some((hx, ht, &hh.value + &hh.error_bound)))
    });
    for (p, row) in points.iter().zip(rows) {
        let Some((hx, ht, hh_upper)) = row? else {
            cert.note(format!("{p}: t has a pole, skipped"));
            continue;
        };
        let two_thirds_ht = ht.mul_rational(&rat(2, 3));
        cert.push(Check::compare(format!("{p}: h_X <= 2/3 h_t + log 7"), &hx, "<=", &(&two_thirds_ht + &log7)));
        cert.push(Check::compare(
            format!("{p}: h_hat <= h_X/2 + 3.54"),
            &hh_upper,
            "<=",
            &(hx.div_int(&BigInt::from(2)) + &silverman),
        ));
        cert.push(Check::compare(
            format!("{p}: h_hat <= h_t/3 + 4.52"),
            &hh_upper,
            "<=",
            &(ht.mul_rational(&rat(1, 3)) + &combined),
        ));
    }
    // 1/2 log 7 + 3.54 <= 4.52 makes the chain imply the combined bound
    let chain = log7.div_int(&BigInt::from(2)) + &silverman;
    cert.push(Check::compare("1/2 log 7 + 3.54 <= 4.52", &chain, "<=", &combined));
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    #[test]
    fn naive_heights() {
        let e = WeierstrassModel::xns11();
        assert!(naive_height(&RationalPoint::p0(), HeightFunction::X, p(30)).unwrap().is_zero());
        let q = RationalPoint::affine(rat(-11, 4), rat(-33, 8));
        let hx = naive_height(&q, HeightFunction::X, p(30)).unwrap();
        assert!(hx.agrees_with(&BigReal::from_i64(11, p(30)).ln(), 28));
        // k = -8 so t = -1/8 and h_t = log 8 = -log|t|
        let ht = naive_height(&q, HeightFunction::T, p(30)).unwrap();
        assert!(ht.agrees_with(&BigReal::from_i64(8, p(30)).ln(), 28));
        assert!(naive_height(&RationalPoint::p0(), HeightFunction::T, p(30)).is_err());
        assert!(e.contains(&q));
    }

    #[test]
    fn height_of_generator() {
        let e = WeierstrassModel::xns11();
        let h = canonical_height(&e, &RationalPoint::p0(), p(40)).unwrap();
        let want = BigReal::parse("0.04489257808034522666", p(40)).unwrap();
        assert!(h.value.agrees_with(&want, 19), "{}", h.value);
        assert_eq!(h.multiplier, 2);
        assert!(h.error_bound.to_f64() < 1e-30);
    }

    #[test]
    fn quadratic_scaling() {
        let e = WeierstrassModel::xns11();
        let h1 = canonical_height(&e, &RationalPoint::p0(), p(30)).unwrap().value;
        for m in 2..=4 {
            let q = e.mul(m, &RationalPoint::p0()).unwrap();
            let hm = canonical_height(&e, &q, p(30)).unwrap().value;
            let ratio = (&hm / &h1).to_f64();
            assert!((ratio - (m * m) as f64).abs() < 1e-20, "m = {m}: {ratio}");
        }
    }

    #[test]
    fn bad_primes_and_reduction() {
        let e = WeierstrassModel::xns11();
        assert_eq!(bad_primes(&e), vec![11]);
        assert!(!has_nonsingular_reduction(&e, &RationalPoint::p0(), 11));
        let q = e.mul(2, &RationalPoint::p0()).unwrap();
        assert!(has_nonsingular_reduction(&e, &q, 11));
    }

    #[test]
    fn comparison_on_solutions() {
        let e = WeierstrassModel::xns11();
        let pts: Vec<_> = (-2..=4).map(|m| e.mul(m, &RationalPoint::p0()).unwrap()).collect();
        let c = verify_height_comparison(&e, &pts, p(30)).unwrap();
        assert!(c.passed, "{c:#?}");
        assert_eq!(c.notes.len(), 3);
    }
}
