//! The interval certificate for the slope function `g` near the cusps and the
//! 11-torsion certificate for the cusps.
//!
//! `g = 3X^2 + 22X + 33 + 11(2Y + 11)/X^2`. With `W = 2Y + 11` and
//! `W^2 = 4X^3 + 44X^2 + 132X + 121` on the curve, every check reduces to real
//! roots of exact univariate polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::certificate::{render, Certificate, Check};
use crate::curve::WeierstrassModel;
use crate::error::{Error, Result};
use crate::exact::{division_polynomial, format_rational, rat, Poly};
use crate::periods::PeriodLattice;
use crate::real::{escalate_values, real_roots, BigReal, Precision};

/// Default `|t|` threshold defining the neighbourhood `U` of the cusps.
pub fn default_threshold() -> BigRational {
    rat(1, 20)
}

/// Reference two-decimal values the certificate is compared against.
pub mod reference {
    /// `t` at the real zeros of `g`.
    pub const ZERO_T: [&str; 4] = ["-7.39", "0.63", "-0.16", "-23.06"];
    /// `g` at the cusps, in increasing order of `x`.
    pub const CUSP_G: [&str; 5] = ["9.75", "-1.78", "1.39", "-3.79", "159.43"];
    /// `t` at the real critical points of `g`.
    pub const CRITICAL_T: [&str; 5] = ["-3.60", "0.34", "-5.19", "-0.44", "2.57"];
    /// `g` at the interval ends with `t = +1/20`, cusps in increasing `x`.
    pub const PLUS_G: [&str; 5] = ["9.30", "-2.05", "1.63", "-4.21", "159.23"];
    /// `g` at the interval ends with `t = -1/20`.
    pub const MINUS_G: [&str; 5] = ["10.18", "-1.46", "1.14", "-3.39", "159.62"];
    /// Smallest `|g|` over the interval ends.
    pub const MIN_ABS_G: &str = "1.14";
    /// Tolerance for two-decimal values.
    pub const TOLERANCE: &str = "0.01";
}

fn wpoly() -> Poly {
    // W^2 = 4X^3 + 44X^2 + 132X + 121
    Poly::from_ints(&[121, 132, 44, 4])
}

/// `X^4 (3X^2 + 22X + 33)^2 - 121 W^2`: abscissas of the zeros of `g`.
pub fn zero_polynomial() -> Poly {
    let a = Poly::from_ints(&[33, 22, 3]);
    let x4 = Poly::monomial(rat(1, 1), 4);
    &(&x4 * &a.pow(2)) - &wpoly().scale(&rat(121, 1))
}

/// `X^3 + 22X^2 + 99X + 121`, which equals `W^2 - X d(W^2)/dX / 4` up to scaling.
fn critical_cubic() -> Poly {
    Poly::from_ints(&[121, 99, 22, 1])
}

/// `484 C^2 - W^2 (6X + 22)^2 X^6`: abscissas of the critical points of `g`
/// on the curve, with `C` the critical cubic.
pub fn critical_polynomial() -> Poly {
    let c = critical_cubic();
    let lin = Poly::from_ints(&[22, 6]);
    let x6 = Poly::monomial(rat(1, 1), 6);
    &c.pow(2).scale(&rat(484, 1)) - &(&(&wpoly() * &lin.pow(2)) * &x6)
}

/// `g` at a real point.
pub fn g_value(x: &BigReal, y: &BigReal) -> BigReal {
    let p = x.precision();
    let quad = Poly::from_ints(&[33, 22, 3]).eval_real(x);
    let w = y.mul_int(&BigInt::from(2)) + BigReal::from_i64(11, p);
    quad + w.mul_int(&BigInt::from(11)) / (x * x)
}

fn t_of(x: &BigReal, y: &BigReal) -> BigReal {
    y - &(BigReal::from_i64(11, x.precision()) / x)
}

/// A real point with its `t`, `g` and elliptic logarithm.
#[derive(Clone, Debug)]
pub struct CurvePoint {
    pub x: BigReal,
    pub y: BigReal,
    pub t: BigReal,
    pub g: BigReal,
    pub lambda: BigReal,
}

impl CurvePoint {
    fn new(x: BigReal, y: BigReal, lat: &PeriodLattice) -> Result<Self> {
        let t = t_of(&x, &y);
        let g = g_value(&x, &y);
        let lambda = lat.elliptic_log_real(&x, &y)?;
        Ok(CurvePoint { x, y, t, g, lambda })
    }
}

/// One interval of `U`: a cusp and the two ends where `t = +threshold` and
/// `t = -threshold`.
#[derive(Clone, Debug)]
pub struct Interval {
    pub cusp: CurvePoint,
    pub plus: CurvePoint,
    pub minus: CurvePoint,
}

/// Everything computed for the interval certificate at one precision.
#[derive(Clone, Debug)]
pub struct IntervalData {
    pub threshold: BigRational,
    pub zeros: Vec<CurvePoint>,
    pub critical: Vec<CurvePoint>,
    pub intervals: Vec<Interval>,
    pub boundary_count: usize,
    pub omega: BigReal,
}

impl IntervalData {
    fn scalars(&self) -> Vec<BigReal> {
        let mut v = vec![self.omega.clone()];
        let pt = |p: &CurvePoint| [p.x.clone(), p.t.clone(), p.g.clone(), p.lambda.clone()];
        for p in self.zeros.iter().chain(&self.critical) {
            v.extend(pt(p));
        }
        for i in &self.intervals {
            for p in [&i.cusp, &i.plus, &i.minus] {
                v.extend(pt(p));
            }
        }
        v
    }

    /// Smallest `|g|` over the interval ends.
    pub fn min_boundary_abs_g(&self) -> Option<BigReal> {
        self.intervals
            .iter()
            .flat_map(|i| [i.plus.g.abs(), i.minus.g.abs()])
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }
}

fn circular_distance(a: &BigReal, b: &BigReal, omega: &BigReal) -> BigReal {
    let d = (a - b).abs();
    let e = omega - &d;
    if e < d {
        e
    } else {
        d
    }
}

fn points_from_y(
    roots: Vec<crate::real::IsolatedRoot>,
    y_of: impl Fn(&BigReal) -> BigReal + Sync,
    lat: &PeriodLattice,
) -> Result<Vec<CurvePoint>> {
    let xs: Vec<BigReal> = roots.into_iter().map(|r| r.value).collect();
    crate::par::map(&xs, |x| CurvePoint::new(x.clone(), y_of(x), lat))
        .into_iter()
        .collect()
}

/// Computes all points entering the interval certificate at `prec`.
pub fn interval_data(threshold: &BigRational, prec: Precision) -> Result<IntervalData> {
    let model = WeierstrassModel::xns11();
    let lat = PeriodLattice::new(&model, prec)?;
    let eleven = BigReal::from_i64(11, prec);
    let half = |w: BigReal| (w - &eleven).div_int(&BigInt::from(2));

    let zeros = points_from_y(
        real_roots(&zero_polynomial(), prec)?,
        |x| {
            let a = Poly::from_ints(&[33, 22, 3]).eval_real(x);
            half(-(x * x * a).div_int(&BigInt::from(11)))
        },
        &lat,
    )?;
    let critical = points_from_y(
        real_roots(&critical_polynomial(), prec)?,
        |x| {
            let num = critical_cubic().eval_real(x).mul_int(&BigInt::from(22));
            let den = Poly::from_ints(&[22, 6]).eval_real(x) * x * x * x;
            half(num / den)
        },
        &lat,
    )?;
    // cusps: W = +-sqrt(W^2) on the branch with y = 11/x
    let cusps = points_from_y(
        real_roots(&model.cusp_polynomial(), prec)?,
        |x| {
            let w2 = wpoly().eval_real(x);
            let w = if w2.is_negative() { BigReal::zero(prec) } else { w2.sqrt() };
            let target = (&eleven / x).mul_int(&BigInt::from(2)) + &eleven;
            half(if target.is_negative() { -w } else { w })
        },
        &lat,
    )?;
    let mut ends = Vec::new();
    for s in [threshold.clone(), -threshold.clone()] {
        let sr = BigReal::from_rational(&s, prec);
        let pts = points_from_y(
            real_roots(&model.t_level_polynomial(&s), prec)?,
            |x| &eleven / x + &sr,
            &lat,
        )?;
        ends.push(pts);
    }
    let boundary_count = ends[0].len() + ends[1].len();
    let omega = lat.omega();
    let nearest = |c: &CurvePoint, pool: &[CurvePoint]| -> Option<usize> {
        (0..pool.len()).min_by(|&i, &j| {
            circular_distance(&pool[i].lambda, &c.lambda, &omega)
                .partial_cmp(&circular_distance(&pool[j].lambda, &c.lambda, &omega))
                .unwrap()
        })
    };
    let mut intervals = Vec::new();
    for c in cusps {
        let (Some(i), Some(j)) = (nearest(&c, &ends[0]), nearest(&c, &ends[1])) else {
            return Err(Error::Domain("no boundary points found".into()));
        };
        intervals.push(Interval {
            plus: ends[0][i].clone(),
            minus: ends[1][j].clone(),
            cusp: c,
        });
    }
    Ok(IntervalData {
        threshold: threshold.clone(),
        zeros,
        critical,
        intervals,
        boundary_count,
        omega,
    })
}

/// Assigns each reference value a distinct computed value within `tol`;
/// returns the computed index for each reference, or `None` when impossible.
pub fn match_values(computed: &[BigReal], expected: &[&str], tol: &str) -> Option<Vec<usize>> {
    if computed.len() != expected.len() {
        return None;
    }
    let prec = computed.first()?.precision();
    let tol = BigReal::parse(tol, prec).ok()?;
    let exp: Vec<BigReal> = expected.iter().map(|e| BigReal::parse(e, prec).unwrap()).collect();
    // backtracking over at most five values
    fn go(i: usize, c: &[BigReal], e: &[BigReal], tol: &BigReal, used: &mut Vec<bool>, out: &mut Vec<usize>) -> bool {
        if i == e.len() {
            return true;
        }
        for j in 0..c.len() {
            if !used[j] && (&c[j] - &e[i]).abs() <= *tol {
                used[j] = true;
                out.push(j);
                if go(i + 1, c, e, tol, used, out) {
                    return true;
                }
                out.pop();
                used[j] = false;
            }
        }
        false
    }
    let mut used = vec![false; computed.len()];
    let mut out = Vec::new();
    go(0, computed, &exp, &tol, &mut used, &mut out).then_some(out)
}

/// Serializable summary of one interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub cusp_x: String,
    pub cusp_g: String,
    pub cusp_lambda: String,
    pub plus_x: String,
    pub plus_g: String,
    pub minus_x: String,
    pub minus_g: String,
}

/// The interval lemma certificate with the recorded intervals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalCertificate {
    pub threshold: String,
    pub intervals: Vec<IntervalRecord>,
    pub zero_t: Vec<String>,
    pub critical_t: Vec<String>,
    pub min_boundary_abs_g: Option<String>,
    pub certificate: Certificate,
}

fn push_list(cert: &mut Certificate, label: &str, values: &[BigReal], expected: &[&str]) {
    let tol = reference::TOLERANCE;
    let matched = match_values(values, expected, tol);
    let identity: Vec<usize> = (0..expected.len()).collect();
    match &matched {
        Some(perm) => {
            for (i, &j) in perm.iter().enumerate() {
                cert.push(Check::approx(format!("{label} #{}", i + 1), &values[j], expected[i], tol));
            }
            if perm != &identity {
                cert.record(format!("{label} order"), format!("{perm:?}"));
            }
        }
        None => {
            cert.push(Check::exact(
                format!("{label} count"),
                values.len(),
                expected.len(),
            ));
            for (i, e) in expected.iter().enumerate() {
                match values.get(i) {
                    Some(v) => cert.push(Check::approx(format!("{label} #{}", i + 1), v, e, tol)),
                    None => cert.push(Check::flag(format!("{label} #{}", i + 1), false, "missing")),
                };
            }
        }
    }
}

/// Machine check that `|g| >= 1` on the set where `|t| < threshold`.
///
/// Runs at `prec` and again at `factor * prec`; every computed value must
/// agree to `prec - 10` digits.
pub fn certify_interval_lemma(threshold: &BigRational, prec: Precision, factor: f64) -> Result<IntervalCertificate> {
    let (data, _) = escalate_values(prec, factor, |p| {
        let d = interval_data(threshold, p)?;
        Ok((d.scalars(), d))
    })?;
    let mut cert = Certificate::new("interval lemma").with_precision(prec.digits());
    let thr = BigReal::from_rational(threshold, prec);
    cert.record("threshold", format_rational(threshold));
    cert.record("escalation digits", prec.scaled(factor).digits());

    let zero_t: Vec<BigReal> = data.zeros.iter().map(|p| p.t.clone()).collect();
    let crit_t: Vec<BigReal> = data.critical.iter().map(|p| p.t.clone()).collect();
    push_list(&mut cert, "t at zero of g", &zero_t, &reference::ZERO_T);
    for (i, t) in zero_t.iter().enumerate() {
        cert.push(Check::compare(format!("|t| at zero of g #{}", i + 1), &t.abs(), ">", &thr));
    }
    let cusp_g: Vec<BigReal> = data.intervals.iter().map(|i| i.cusp.g.clone()).collect();
    push_list(&mut cert, "g at cusp", &cusp_g, &reference::CUSP_G);
    push_list(&mut cert, "t at critical point", &crit_t, &reference::CRITICAL_T);
    for (i, t) in crit_t.iter().enumerate() {
        cert.push(Check::compare(format!("|t| at critical point #{}", i + 1), &t.abs(), ">", &thr));
    }
    let plus: Vec<BigReal> = data.intervals.iter().map(|i| i.plus.g.clone()).collect();
    let minus: Vec<BigReal> = data.intervals.iter().map(|i| i.minus.g.clone()).collect();
    push_list(&mut cert, "g at t = +threshold", &plus, &reference::PLUS_G);
    push_list(&mut cert, "g at t = -threshold", &minus, &reference::MINUS_G);

    cert.push(Check::exact("boundary points", data.boundary_count, 10));
    cert.push(Check::exact("intervals", data.intervals.len(), 5));
    let mut ends: Vec<String> = data
        .intervals
        .iter()
        .flat_map(|i| [render(&i.plus.x), render(&i.minus.x)])
        .collect();
    ends.sort();
    ends.dedup();
    cert.push(Check::exact("distinct interval ends", ends.len(), 2 * data.intervals.len()));
    let tiny = BigReal::from_rational(&BigReal::ulp_radius(prec, 20), prec);
    for (k, i) in data.intervals.iter().enumerate() {
        let om = &data.omega;
        let via = circular_distance(&i.plus.lambda, &i.cusp.lambda, om)
            + circular_distance(&i.cusp.lambda, &i.minus.lambda, om);
        let direct = circular_distance(&i.plus.lambda, &i.minus.lambda, om);
        cert.push(Check::flag(
            format!("cusp #{} lies inside its interval", k + 1),
            (&via - &direct).abs() <= tiny,
            render(&(&via - &direct)),
        ));
        cert.push(Check::flag(
            format!("g keeps its sign on interval #{}", k + 1),
            i.plus.g.signum() == i.cusp.g.signum() && i.minus.g.signum() == i.cusp.g.signum(),
            format!("{} {} {}", i.plus.g.signum(), i.cusp.g.signum(), i.minus.g.signum()),
        ));
        cert.push(Check::compare(
            format!("|t| at cusp #{} vanishes", k + 1),
            &i.cusp.t.abs(),
            "<",
            &BigReal::from_rational(&BigReal::ulp_radius(prec, 20), prec),
        ));
    }
    // the zeros, cusps and critical points are separated
    let all: Vec<&CurvePoint> = data
        .zeros
        .iter()
        .chain(&data.critical)
        .chain(data.intervals.iter().map(|i| &i.cusp))
        .collect();
    let mut min_sep: Option<BigReal> = None;
    for a in 0..all.len() {
        for b in a + 1..all.len() {
            let d = (&all[a].x - &all[b].x).abs() + (&all[a].y - &all[b].y).abs();
            if min_sep.as_ref().is_none_or(|m| d < *m) {
                min_sep = Some(d);
            }
        }
    }
    if let Some(m) = &min_sep {
        let sep = BigReal::parse("0.01", prec)?;
        cert.push(Check::compare("separation of special points", m, ">", &sep));
    }

    let min_g = data.min_boundary_abs_g();
    match &min_g {
        Some(m) => {
            cert.push(Check::approx("min |g| at interval ends", m, reference::MIN_ABS_G, reference::TOLERANCE));
            cert.push(Check::compare("min |g| at interval ends >= 1", m, ">=", &BigReal::one(prec)));
        }
        None => {
            cert.fail("no interval ends");
        }
    }
    Ok(IntervalCertificate {
        threshold: format_rational(threshold),
        intervals: data
            .intervals
            .iter()
            .map(|i| IntervalRecord {
                cusp_x: render(&i.cusp.x),
                cusp_g: render(&i.cusp.g),
                cusp_lambda: render(&i.cusp.lambda),
                plus_x: render(&i.plus.x),
                plus_g: render(&i.plus.g),
                minus_x: render(&i.minus.x),
                minus_g: render(&i.minus.g),
            })
            .collect(),
        zero_t: zero_t.iter().map(render).collect(),
        critical_t: crit_t.iter().map(render).collect(),
        min_boundary_abs_g: min_g.as_ref().map(render),
        certificate: cert,
    })
}

/// Per-cusp torsion data.
#[derive(Clone, Debug)]
pub struct CuspLog {
    pub x: BigReal,
    pub lambda: BigReal,
    /// `11 lambda / Omega`.
    pub scaled: BigReal,
    pub k: BigInt,
}

/// Elliptic logs of the cusps and their multiples `11 lambda / Omega`.
pub fn cusp_logs(prec: Precision) -> Result<Vec<CuspLog>> {
    let model = WeierstrassModel::xns11();
    let lat = PeriodLattice::new(&model, prec)?;
    let eleven = BigReal::from_i64(11, prec);
    let roots = real_roots(&model.cusp_polynomial(), prec)?;
    let om = lat.omega();
    roots
        .into_iter()
        .map(|r| {
            let x = r.value;
            let y = &eleven / &x;
            let lambda = lat.elliptic_log_real(&x, &y)?;
            let scaled = (&lambda / &om).mul_int(&BigInt::from(11));
            let k = scaled.round();
            Ok(CuspLog { x, lambda, scaled, k })
        })
        .collect()
}

/// Tolerance for `11 lambda / Omega` to be an integer.
pub const TORSION_TOLERANCE: &str = "1e-30";

/// The cusps are 11-torsion: `psi_11` is divisible by the cusp quintic, and
/// numerically `11 lambda(Q) / Omega` is an integer for each cusp `Q`.
pub fn certify_cusp_torsion(prec: Precision) -> Result<Certificate> {
    let model = WeierstrassModel::xns11();
    let mut cert = Certificate::new("cusp torsion").with_precision(prec.digits());
    let p = model.cusp_polynomial();
    let (psi, logs) = crate::par::join(|| division_polynomial(&model, 11), || cusp_logs(prec));
    let psi = psi?;
    let rem = psi.rem(&p)?;
    cert.record("psi_11 degree", psi.degree().unwrap_or(0));
    cert.push(Check::exact("psi_11 mod cusp quintic", rem.to_string(), "0"));
    let logs = logs?;
    cert.push(Check::exact("cusps", logs.len(), 5));
    let mut sum = BigInt::from(0);
    for (i, c) in logs.iter().enumerate() {
        let dist = (&c.scaled - &BigReal::from_int(&c.k, prec)).abs();
        cert.push(Check::compare(
            format!("cusp #{}: |11 lambda/Omega - k|", i + 1),
            &dist,
            "<",
            &BigReal::parse(TORSION_TOLERANCE, prec)?,
        ));
        cert.push(Check::flag(
            format!("cusp #{}: 0 < lambda < Omega", i + 1),
            c.lambda.is_positive() && c.k > BigInt::from(0) && c.k < BigInt::from(11),
            format!("k = {}", c.k),
        ));
        cert.record(format!("cusp #{} x", i + 1), render(&c.x));
        cert.record(format!("cusp #{} k", i + 1), &c.k);
        sum += &c.k;
    }
    cert.record("sum of k", &sum);
    cert.note("the k per cusp is observed, not compared with a reference");
    Ok(cert)
}
