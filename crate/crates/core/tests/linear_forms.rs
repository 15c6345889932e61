//! The bound on the multiples of the generator, its reduction by continued
//! fractions and the full pipeline.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;

use xns11_core::curve::{k_value, RationalPoint};
use xns11_core::exact::format_rational;
use xns11_core::linear_forms::{
    convergents_coprime, derive_absolute_bound, david_lower_bound, log_data, nearest_lattice_distance,
    reduce_by_convergents, reduction_stability, scan_small_k, solve_integral_points, sweep_small_multiples,
    upper_bound_rhs, Constants, LogData, INTEGRAL_MULTIPLES, SCAN_K_VALUES,
};
use xns11_core::real::{continued_fraction_exact, Precision};

fn prec(d: u32) -> Precision {
    Precision::new(d).unwrap()
}

fn data() -> &'static LogData {
    static D: OnceLock<LogData> = OnceLock::new();
    D.get_or_init(|| log_data(&Constants::default(), prec(60)).unwrap())
}

#[test]
fn upper_bound_rhs_against_f64() {
    let k = Constants::default();
    for m in [0i64, 1, 5, 12, 20] {
        let got = upper_bound_rhs(&BigInt::from(m), &k, prec(40)).to_f64();
        let want = 11.0 * (13.56 - 0.13 * (m * m) as f64).exp();
        assert!((got - want).abs() <= 1e-12 * want, "m = {m}: {got} vs {want}");
    }
    let at_zero = upper_bound_rhs(&BigInt::from(0), &k, prec(40)).to_f64();
    assert!((at_zero - 8_519_730.55).abs() < 0.01);
    assert!((at_zero / 8.54e6 - 1.0).abs() < 5e-3);
    assert!(upper_bound_rhs(&BigInt::from(12), &k, prec(40)).to_f64() < 0.07);
}

/// The crossing of `0.13 m^2 - ln 11 - 13.56` with
/// `C (ln m + 1)(ln ln m + 15 ln 2 + 1)^3`, bisected in f64.
fn crossing_f64() -> f64 {
    let c = 7.658e44;
    let gap = |u: f64| {
        0.13 * (2.0 * u).exp() - 11f64.ln() - 13.56 - c * (u + 1.0) * (u.ln() + 15.0 * 2f64.ln() + 1.0).powi(3)
    };
    let (mut lo, mut hi) = (12f64.ln(), 30.0 * 10f64.ln());
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.exp()
}

#[test]
fn absolute_bound() {
    let b = derive_absolute_bound(&Constants::default(), prec(40)).unwrap();
    assert!(b.certificate.passed, "{:?}", b.certificate.failures().collect::<Vec<_>>());
    assert_eq!(b.bound, "1415000000000000000000000000");
    let crossing: f64 = b.crossing.parse().unwrap();
    // the crossing is rendered with six significant digits
    assert!((crossing / crossing_f64() - 1.0).abs() < 1e-5, "{crossing} vs {}", crossing_f64());
    assert!(crossing < 3.62e25 * 1.1 && crossing > 3.62e25 / 1.1);
}

#[test]
fn david_bound_needs_large_b() {
    let k = Constants::default();
    assert!(david_lower_bound(&BigInt::from(1000), &k.david, prec(30)).is_err());
    let b: BigInt = "2000000000000000000000000000".parse().unwrap();
    let ln = david_lower_bound(&b, &k.david, prec(30)).unwrap();
    assert!(ln.is_negative());
    let u = (2e27f64).ln();
    let want = -7.658e44 * (u + 1.0) * (u.ln() + 15.0 * 2f64.ln() + 1.0).powi(3);
    assert!((ln.to_f64() / want - 1.0).abs() < 1e-12);
}

#[test]
fn reduction_at_sixty_digits() {
    let k = Constants::default();
    let t = reduce_by_convergents(&k, 60, 2.0).unwrap();
    assert!(t.certificate.passed, "{:?}", t.certificate.failures().collect::<Vec<_>>());
    assert_eq!(t.cutoff_index, Some(56));
    assert_eq!(t.rows.len(), 56);
    assert!(t.rows.iter().all(|r| r.passed));
    assert!(convergents_coprime(&t.rows));
    let cap: BigInt = "1415000000000000000000000000".parse().unwrap();
    let q_lower: BigInt = t.cutoff_q_lower.as_deref().unwrap().parse().unwrap();
    assert!(q_lower >= cap);
    let last: BigInt = t.rows.last().unwrap().q.parse().unwrap();
    assert!(last < cap);
}

/// Each row is a convergent of the 120-digit ratio: `|alpha - p/q| < 1/q^2`
/// and the rows reproduce the exact expansion of a 100-digit truncation.
#[test]
fn reduction_rows_are_convergents() {
    let k = Constants::default();
    let t = reduce_by_convergents(&k, 60, 2.0).unwrap();
    let alpha = log_data(&k, prec(120)).unwrap().alpha;
    let trunc = BigRational::new(
        alpha.mul_int(&BigInt::from(10u32).pow(100)).floor(),
        BigInt::from(10u32).pow(100),
    );
    let exact = continued_fraction_exact(&trunc, 80);
    for r in &t.rows {
        let (p, q): (BigInt, BigInt) = (r.p.parse().unwrap(), r.q.parse().unwrap());
        let err = (alpha.to_rational() - BigRational::new(p.clone(), q.clone())).abs();
        assert!(err < BigRational::new(BigInt::one(), &q * &q), "row {}", r.index);
        // table index = standard index - 1
        let c = &exact[r.index + 1];
        assert_eq!((c.p.clone(), c.q.clone()), (p, q), "row {}", r.index);
    }
}

#[test]
fn reduction_is_stable_across_precisions() {
    let k = Constants::default();
    let (tables, cert) = reduction_stability(&k, 2.0).unwrap();
    assert!(cert.passed, "{:?}", cert.failures().collect::<Vec<_>>());
    let digits: Vec<u32> = tables.iter().map(|t| t.digits).collect();
    assert_eq!(digits, vec![60, 80, 120]);
    for t in &tables {
        assert_eq!(t.cutoff_index, Some(56));
        let rows: Vec<_> = t.rows.iter().map(|r| (&r.a, &r.p, &r.q, r.passed)).collect();
        let first: Vec<_> = tables[0].rows.iter().map(|r| (&r.a, &r.p, &r.q, r.passed)).collect();
        assert_eq!(rows, first);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// The `n` of `|n Omega - m lambda|` is the nearest integer to
    /// `m lambda / Omega`, and the form is below `0.4 Omega / |m|` only for
    /// `n/m` close to a convergent.
    #[test]
    fn nearest_integer_invariant(m in 1i64..=10_000) {
        let d = data();
        let mb = BigInt::from(m);
        let (n, dist) = nearest_lattice_distance(&mb, d);
        let half = d.omega.div_int(&BigInt::from(2));
        prop_assert!(dist <= half);
        for other in [&n - 1, &n + 1] {
            let alt = (d.lambda.mul_int(&mb) - d.omega.mul_int(&other)).abs();
            prop_assert!(alt >= dist);
        }
        let f = (m as f64) * d.alpha.to_f64();
        prop_assert_eq!(n, BigInt::from(f.round() as i64));
    }
}

#[test]
fn scan_and_sweep() {
    let scan = scan_small_k(20);
    let nonempty: Vec<i64> = scan.iter().filter(|(_, v)| !v.is_empty()).map(|(k, _)| *k).collect();
    assert_eq!(nonempty, SCAN_K_VALUES.to_vec());
    assert_eq!(scan.values().map(Vec::len).sum::<usize>(), 7);
    let sweep = sweep_small_multiples(12).unwrap();
    assert_eq!(sweep.len(), 23);
    let ms: Vec<i64> = sweep.iter().filter(|r| r.integral).map(|r| r.m).collect();
    assert_eq!(ms, INTEGRAL_MULTIPLES.to_vec());
}

#[test]
fn solve_finds_the_seven_points() {
    let r = solve_integral_points(&Constants::default(), prec(60), 2.0);
    for s in &r.stages {
        assert!(s.certificate.passed, "{}: {:?}", s.certificate.name, s.certificate.failures().collect::<Vec<_>>());
    }
    assert!(r.passed);
    let ms: Vec<i64> = r.points.iter().map(|p| p.m).collect();
    assert_eq!(ms, INTEGRAL_MULTIPLES.to_vec());
    let mut pts: Vec<RationalPoint> = r.points.iter().map(|p| p.point.clone()).collect();
    pts.sort();
    let mut want = xns11_core::linear_forms::integral_points();
    want.sort();
    assert_eq!(pts, want);
    assert!(r.reduction.is_some() && r.bound.is_some());
    for p in &r.points {
        assert_eq!(p.k, format_rational(&k_value(&p.point).unwrap()));
    }
}
