//! Canonical and naive heights: the quadratic form identities, the doubling
//! limit and the local comparison bounds.

use std::sync::OnceLock;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xns11_core::curve::{t_value, RationalPoint, WeierstrassModel};
use xns11_core::exact::rational_valuation;
use xns11_core::heights::{
    canonical_height, canonical_height_with, log_height_of_rational, naive_height, nonarchimedean_bound_holds,
    verify_height_comparison, HeightFunction, TateSeries,
};
use xns11_core::linear_forms::integral_points;
use xns11_core::real::{BigReal, Precision};

const H_P0: &str = "0.04489257808034522666";

fn prec(d: u32) -> Precision {
    Precision::new(d).unwrap()
}

fn series() -> &'static TateSeries {
    static S: OnceLock<TateSeries> = OnceLock::new();
    S.get_or_init(|| TateSeries::new(&WeierstrassModel::xns11()).unwrap())
}

fn h_hat(m: i64) -> BigReal {
    let e = WeierstrassModel::xns11();
    let p = e.mul(m, &RationalPoint::p0()).unwrap();
    canonical_height_with(&e, series(), &p, prec(30)).unwrap().value
}

#[test]
fn height_of_generator() {
    let p = prec(40);
    let e = WeierstrassModel::xns11();
    let h = canonical_height(&e, &RationalPoint::p0(), p).unwrap();
    assert!(h.value.agrees_with(&BigReal::parse(H_P0, p).unwrap(), 19), "{}", h.value);
    assert!((h.value.to_f64() - 0.04489).abs() < 1e-5);
    assert!(h.error_bound.to_f64() < 1e-30);
}

/// `h_hat(P) = lim h_x(2^n P) / (2 4^n)`, with error `O(4^-n)`.
#[test]
fn height_matches_doubling_limit() {
    let e = WeierstrassModel::xns11();
    let p = prec(30);
    let mut q = RationalPoint::p0();
    let n = 9;
    for _ in 0..n {
        q = e.add(&q, &q).unwrap();
    }
    let hx = log_height_of_rational(q.x().unwrap(), p).to_f64();
    let limit = hx / (2.0 * 4f64.powi(n));
    assert!((limit - 0.04489257808034522666).abs() < 1e-4, "{limit}");
}

#[test]
fn height_vanishes_on_torsion() {
    // y^2 = x^3 + 1 has torsion Z/6 generated by (2, 3)
    let f = WeierstrassModel::new([0, 0, 0, 0, 1]).unwrap();
    for pt in [RationalPoint::from_ints(2, 3), RationalPoint::from_ints(0, 1), RationalPoint::from_ints(-1, 0)] {
        let h = canonical_height(&f, &pt, prec(30)).unwrap();
        assert!(h.value.is_zero());
    }
}

#[test]
fn height_on_another_curve_matches_doubling_limit() {
    let e = WeierstrassModel::new([0, 0, 0, 0, -2]).unwrap();
    let p = prec(30);
    let pt = RationalPoint::from_ints(3, 5);
    let h = canonical_height(&e, &pt, p).unwrap().value.to_f64();
    let mut q = pt;
    let n = 8;
    for _ in 0..n {
        q = e.add(&q, &q).unwrap();
    }
    let limit = log_height_of_rational(q.x().unwrap(), p).to_f64() / (2.0 * 4f64.powi(n));
    assert!((h - limit).abs() < 1e-3, "{h} vs {limit}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parallelogram_law(a in -6i64..=6, b in -6i64..=6) {
        let lhs = &h_hat(a + b) + &h_hat(a - b);
        let rhs = (&h_hat(a) + &h_hat(b)).mul_int(&BigInt::from(2));
        prop_assert!((&lhs - &rhs).abs().to_f64() < 1e-4);
    }

    #[test]
    fn height_is_quadratic(m in -12i64..=12) {
        let want = h_hat(1).mul_int(&BigInt::from(m * m));
        prop_assert!((&h_hat(m) - &want).abs().to_f64() < 1e-20);
    }

    #[test]
    fn nonarchimedean_bound_on_multiples(m in -30i64..=30) {
        let e = WeierstrassModel::xns11();
        let pt = e.mul(m, &RationalPoint::p0()).unwrap();
        let Some(t) = t_value(&pt) else { return Ok(()); };
        prop_assume!(t != num_rational::BigRational::from_integer(0.into()));
        for prime in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            prop_assert_eq!(nonarchimedean_bound_holds(&pt, prime), Some(true));
            // independent restatement: 3 max(0, -v(x)) <= 2 max(0, -v(t))
            let vx = rational_valuation(pt.x().unwrap(), prime).unwrap_or(0).min(0);
            let vt = rational_valuation(&t, prime).unwrap_or(0).min(0);
            prop_assert!(3 * vx >= 2 * vt);
        }
    }

    #[test]
    fn naive_height_chain(m in -12i64..=12) {
        let e = WeierstrassModel::xns11();
        let p = prec(30);
        let pt = e.mul(m, &RationalPoint::p0()).unwrap();
        prop_assume!(t_value(&pt).is_some_and(|t| t != num_rational::BigRational::from_integer(0.into())));
        let hx = naive_height(&pt, HeightFunction::X, p).unwrap().to_f64();
        let ht = naive_height(&pt, HeightFunction::T, p).unwrap().to_f64();
        prop_assert!(hx <= 2.0 / 3.0 * ht + 7f64.ln() + 1e-12);
        prop_assert!(h_hat(m).to_f64() <= ht / 3.0 + 4.52);
    }
}

/// On the real locus with `x > 7`, `|y - 11/x| >= (x/7)^(3/2)`.
#[test]
fn archimedean_bound_by_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let x: f64 = 7.0 * 10f64.powf(rng.gen_range(1e-9..8.0));
        let w2 = 4.0 * x.powi(3) + 44.0 * x * x + 132.0 * x + 121.0;
        let bound = (x / 7.0).powf(1.5);
        for sign in [1.0, -1.0] {
            let y = (-11.0 + sign * w2.sqrt()) / 2.0;
            let t = (y - 11.0 / x).abs();
            assert!(t >= bound * (1.0 - 1e-12), "x = {x}, y = {y}: {t} < {bound}");
        }
    }
}

#[test]
fn comparison_certificate_on_the_seven_points() {
    let e = WeierstrassModel::xns11();
    let mut pts = integral_points();
    for m in -6..=6 {
        pts.push(e.mul(m, &RationalPoint::p0()).unwrap());
    }
    let c = verify_height_comparison(&e, &pts, prec(40)).unwrap();
    assert!(c.passed, "{:?}", c.failures().collect::<Vec<_>>());
}
