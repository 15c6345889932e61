//! The acceptance suite: one PASS/FAIL line per criterion, non-zero exit on
//! any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use xns11_core::analytic::{certify_cusp_torsion, certify_interval_lemma, cusp_logs, default_threshold};
use xns11_core::curve::{RationalPoint, WeierstrassModel};
use xns11_core::exact::{content_valuation_bi, division_polynomial, rat, resultant, Poly};
use xns11_core::heights::canonical_height;
use xns11_core::linear_forms::{
    derive_absolute_bound, integral_points, log_data, reduction_stability, scan_small_k, solve_integral_points,
    upper_bound_rhs_ln, Constants,
};
use xns11_core::modular::{certify_equivalence_theorem, j_map, jmap_data};
use xns11_core::periods::PeriodLattice;
use xns11_core::real::{count_real_roots, BigReal, Precision};

type Outcome = Result<String, String>;

fn prec(d: u32) -> Precision {
    Precision::new(d).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn near(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= tol, format!("{what} = {got}, expected {want} +- {tol}"))
}

fn solve() -> Outcome {
    let r = solve_integral_points(&Constants::default(), prec(60), 2.0);
    ensure(r.passed, "a pipeline stage failed")?;
    let ms: Vec<i64> = r.points.iter().map(|p| p.m).collect();
    ensure(ms == vec![-2, -1, 0, 1, 2, 3, 4], format!("m values {ms:?}"))?;
    let mut got: Vec<RationalPoint> = r.points.iter().map(|p| p.point.clone()).collect();
    let mut want = integral_points();
    got.sort();
    want.sort();
    ensure(got == want, "point set differs")?;
    Ok(format!("{} points, m = {ms:?}", got.len()))
}

fn constants() -> Outcome {
    let p = prec(40);
    let e = WeierstrassModel::xns11();
    let lat = PeriodLattice::new(&e, p).map_err(|e| e.to_string())?;
    let omega = lat.omega().to_f64();
    let lambda = lat
        .elliptic_log(&e.mul(11, &RationalPoint::p0()).unwrap())
        .unwrap()
        .value
        .to_f64();
    let c = lat.real_root().to_f64();
    let h = canonical_height(&e, &RationalPoint::p0(), p).unwrap().value.to_f64();
    near(omega, 4.8024, 1e-3, "Omega")?;
    near(lambda, 3.5579, 1e-3, "lambda(11 P0)")?;
    near(c, -6.8026, 1e-3, "c")?;
    near(h, 0.04489, 1e-5, "h_hat(P0)")?;
    Ok(format!("Omega {omega:.6}, lambda(11 P0) {lambda:.6}, c {c:.6}, h_hat(P0) {h:.8}"))
}

const ZERO_T: [f64; 4] = [-7.39, 0.63, -0.16, -23.06];
const CRITICAL_T: [f64; 5] = [-3.60, 0.34, -5.19, -0.44, 2.57];
const CUSP_G: [f64; 5] = [9.75, -1.78, 1.39, -3.79, 159.43];
const PLUS_G: [f64; 5] = [9.30, -2.05, 1.63, -4.21, 159.23];
const MINUS_G: [f64; 5] = [10.18, -1.46, 1.14, -3.39, 159.62];

fn interval_values() -> Outcome {
    let c = certify_interval_lemma(&default_threshold(), prec(40), 2.0).map_err(|e| e.to_string())?;
    ensure(c.certificate.passed, "interval certificate failed")?;
    let parse = |s: &String| s.parse::<f64>().map_err(|e| e.to_string());
    let mut pairs: Vec<(f64, f64, String)> = vec![];
    let mut add = |got: &[String], want: &[f64], name: &str| -> Result<(), String> {
        ensure(got.len() == want.len(), format!("{name}: {} values", got.len()))?;
        for (i, (g, w)) in got.iter().zip(want).enumerate() {
            pairs.push((parse(g)?, *w, format!("{name}[{i}]")));
        }
        Ok(())
    };
    add(&c.zero_t, &ZERO_T, "t at zeros")?;
    add(&c.critical_t, &CRITICAL_T, "t at critical points")?;
    let col = |f: fn(&xns11_core::analytic::IntervalRecord) -> &String| -> Vec<String> {
        c.intervals.iter().map(|r| f(r).clone()).collect()
    };
    add(&col(|r| &r.cusp_g), &CUSP_G, "g at cusps")?;
    add(&col(|r| &r.plus_g), &PLUS_G, "g at t = +1/20")?;
    add(&col(|r| &r.minus_g), &MINUS_G, "g at t = -1/20")?;
    ensure(pairs.len() == 24, format!("{} values", pairs.len()))?;
    for (g, w, name) in &pairs {
        near(*g, *w, 0.01 + 1e-12, name)?;
    }
    let min: f64 = parse(c.min_boundary_abs_g.as_ref().ok_or("no minimum")?)?;
    near(min, 1.14, 0.01, "min |g|")?;
    ensure(min >= 1.0, "min |g| < 1")?;
    Ok(format!("24 values within 0.01, min |g| = {min:.4}"))
}

fn torsion() -> Outcome {
    let e = WeierstrassModel::xns11();
    let psi = division_polynomial(&e, 11).map_err(|e| e.to_string())?;
    ensure(psi.rem(&e.cusp_polynomial()).unwrap().is_zero(), "psi_11 mod p != 0")?;
    let p = prec(60);
    let tol = BigReal::parse("1e-30", p).unwrap();
    let logs = cusp_logs(p).map_err(|e| e.to_string())?;
    ensure(logs.len() == 5, "not five cusps")?;
    let mut ks = vec![];
    for c in &logs {
        let d = (&c.scaled - &BigReal::from_int(&c.k, p)).abs();
        ensure(d < tol, format!("|11 lambda/Omega - k| = {d}"))?;
        ks.push(c.k.to_string());
    }
    ensure(certify_cusp_torsion(p).map_err(|e| e.to_string())?.passed, "torsion certificate failed")?;
    Ok(format!("psi_11 mod p = 0, k = [{}]", ks.join(", ")))
}

fn reduction() -> Outcome {
    let k = Constants::default();
    let (tables, cert) = reduction_stability(&k, 2.0).map_err(|e| e.to_string())?;
    ensure(cert.passed, "stability certificate failed")?;
    let digits: Vec<u32> = tables.iter().map(|t| t.digits).collect();
    ensure(digits == vec![60, 80, 120], format!("digits {digits:?}"))?;
    let shape = |t: &xns11_core::linear_forms::ReductionTable| -> Vec<(String, String, String, bool)> {
        t.rows.iter().map(|r| (r.a.clone(), r.p.clone(), r.q.clone(), r.passed)).collect()
    };
    for t in &tables {
        ensure(t.cutoff_index == Some(56), format!("cutoff {:?} at {} digits", t.cutoff_index, t.digits))?;
        ensure(shape(t) == shape(&tables[0]), format!("table at {} digits differs", t.digits))?;
    }
    // recheck every row with q >= 12 from the logs directly
    let p = prec(60);
    let data = log_data(&k, p).map_err(|e| e.to_string())?;
    let twelve = BigInt::from(12);
    let mut checked = 0;
    for r in &tables[0].rows {
        let (pk, qk): (BigInt, BigInt) = (r.p.parse().unwrap(), r.q.parse().unwrap());
        if r.index > 55 || qk < twelve {
            continue;
        }
        let lhs = (data.omega.mul_int(&pk) - data.lambda.mul_int(&qk)).abs();
        ensure(!lhs.is_zero() && lhs.ln() > upper_bound_rhs_ln(&qk, &k, p), format!("row {}", r.index))?;
        checked += 1;
    }
    Ok(format!("cutoff 56 at 60/80/120 digits, {checked} rows with q >= 12 satisfy the strict inequality"))
}

fn absolute_bound() -> Outcome {
    let b = derive_absolute_bound(&Constants::default(), prec(40)).map_err(|e| e.to_string())?;
    ensure(b.certificate.passed, "bound certificate failed")?;
    let crossing: f64 = b.crossing.parse().map_err(|_| "crossing unparsable")?;
    ensure(crossing <= 3.62e25 * 1.1 && crossing >= 3.62e25 / 1.1, format!("crossing {crossing:e}"))?;
    ensure(b.bound == "1415000000000000000000000000", format!("bound {}", b.bound))?;
    Ok(format!("crossing {crossing:.4e}, bound {}", b.bound))
}

fn scan() -> Outcome {
    let s = scan_small_k(20);
    let nonempty: Vec<i64> = s.iter().filter(|(_, v)| !v.is_empty()).map(|(k, _)| *k).collect();
    ensure(nonempty == vec![-8, -6, -2, 0, 2], format!("nonempty at {nonempty:?}"))?;
    Ok(format!("nonempty at {nonempty:?}"))
}

fn resultant_check() -> Outcome {
    let r = jmap_data().r_polynomial().map_err(|e| e.to_string())?;
    ensure(r.degree() == Some(31), format!("deg r = {:?}", r.degree()))?;
    let p = WeierstrassModel::xns11().cusp_polynomial();
    let res = resultant(&p, &r).map_err(|e| e.to_string())?;
    ensure(res.abs() == BigInt::from(11).pow(63u32), "|res(p, r)| != 11^63")?;
    let eleven = rat(11, 1);
    let v = content_valuation_bi(&jmap_data().h.scale_vars(&eleven, &eleven), 11).map_err(|e| e.to_string())?;
    ensure(v >= 14, format!("v_11 = {v}"))?;
    Ok(format!("deg r = 31, |res(p, r)| = 11^63, v_11 content = {v}"))
}

fn j_values() -> Outcome {
    let cube = |c: i64, b: i64| BigRational::from_integer(BigInt::from(c) * BigInt::from(b).pow(3u32));
    let want = vec![
        cube(-1, 5280),
        cube(1, 66),
        cube(1, 12),
        cube(-3, 160),
        cube(-1, 640320),
        BigRational::zero(),
        cube(2, 30),
    ];
    let got: Vec<BigRational> = integral_points().iter().map(|p| j_map(p).unwrap()).collect();
    ensure(got == want, "j-values differ")?;
    let c = certify_equivalence_theorem(12).map_err(|e| e.to_string())?;
    ensure(c.passed, "equivalence certificate failed")?;
    Ok("seven CM values in order, equivalence for |m| <= 12".into())
}

fn runner() -> TestRunner {
    let config = Config {
        cases: 100,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn property_suites() -> Outcome {
    let e = WeierstrassModel::xns11();
    let g = RationalPoint::p0();
    let mut out = vec![];

    let mut r = runner();
    r.run(&(-6i64..=6, -6i64..=6, -6i64..=6), |(a, b, c)| {
        let (p, q, s) = (e.mul(a, &g).unwrap(), e.mul(b, &g).unwrap(), e.mul(c, &g).unwrap());
        let lhs = e.add(&e.add(&p, &q).unwrap(), &s).unwrap();
        prop_assert_eq!(lhs, e.add(&p, &e.add(&q, &s).unwrap()).unwrap());
        prop_assert_eq!(e.add(&p, &q).unwrap(), e.add(&q, &p).unwrap());
        prop_assert_eq!(e.add(&p, &RationalPoint::Infinity).unwrap(), p.clone());
        prop_assert_eq!(e.add(&p, &e.negate(&p).unwrap()).unwrap(), RationalPoint::Infinity);
        Ok(())
    })
    .map_err(|f| format!("group law: {f}"))?;
    out.push("group law");

    let hp = prec(30);
    let h = |m: i64| canonical_height(&e, &e.mul(m, &g).unwrap(), hp).unwrap().value;
    let mut r = runner();
    r.run(&(-6i64..=6, -6i64..=6), |(a, b)| {
        let lhs = &h(a + b) + &h(a - b);
        let rhs = (&h(a) + &h(b)).mul_int(&BigInt::from(2));
        prop_assert!((&lhs - &rhs).abs().to_f64() < 1e-4);
        Ok(())
    })
    .map_err(|f| format!("parallelogram law: {f}"))?;
    out.push("parallelogram law");

    let lp = prec(40);
    let lat = PeriodLattice::new(&e, lp).unwrap();
    let tol = BigReal::parse(&format!("1e-{}", lp.digits() - 10), lp).unwrap();
    let mut r = runner();
    r.run(&(-9i64..=9, -9i64..=9), |(a, b)| {
        let (pa, pb) = (e.mul(a, &g).unwrap(), e.mul(b, &g).unwrap());
        let s = e.add(&pa, &pb).unwrap();
        let l = |p: &RationalPoint| lat.elliptic_log(p).unwrap().value;
        let d = &(&l(&pa) + &l(&pb)) - &l(&s);
        prop_assert!(lat.distance_to_lattice(&d) < tol);
        Ok(())
    })
    .map_err(|f| format!("log additivity: {f}"))?;
    out.push("log additivity");

    let mut r = runner();
    let roots = prop::collection::vec(-15i64..=15, 0..7);
    r.run(&(roots, 1i64..=20, any::<bool>()), |(rs, c, split)| {
        let mut p = Poly::from_ints(&[1]);
        for &x in &rs {
            p = &p * &Poly::from_ints(&[-x, 1]);
        }
        // x^2 + c has no real roots, x^2 - 2c^2 has two irrational ones
        let q = if split { Poly::from_ints(&[-2 * c * c, 0, 1]) } else { Poly::from_ints(&[c, 0, 1]) };
        p = &p * &q;
        let mut distinct = rs.clone();
        distinct.sort();
        distinct.dedup();
        let want = distinct.len() + if split { 2 } else { 0 };
        prop_assert_eq!(count_real_roots(&p).unwrap(), want);
        Ok(())
    })
    .map_err(|f| format!("Sturm counts: {f}"))?;
    out.push("Sturm counts");

    Ok(format!("{} with 100 cases each", out.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("solve returns exactly the seven points", solve),
        ("period, log, real root and height constants", constants),
        ("interval certificate reproduces the 24 printed values", interval_values),
        ("cusps are 11-torsion", torsion),
        ("continued fraction reduction", reduction),
        ("absolute bound", absolute_bound),
        ("k scan", scan),
        ("resultant and 11-adic content", resultant_check),
        ("j-values and integrality equivalence", j_values),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why} ({ms} ms)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
