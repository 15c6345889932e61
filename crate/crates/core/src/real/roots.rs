use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{BigReal, Precision};
use crate::error::{domain, Result};
use crate::exact::{rat, Poly};

/// A real root of a polynomial, enclosed in `[lo, hi]` and refined to a
/// working-precision value.
#[derive(Clone, Debug)]
pub struct IsolatedRoot {
    pub lo: BigRational,
    pub hi: BigRational,
    pub value: BigReal,
    pub poly: Poly,
}

impl IsolatedRoot {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// The enclosure midpoint as an exact rational.
    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / rat(2, 1)
    }

    /// True when the squarefree source polynomial changes sign across the
    /// interval or vanishes at its (single-point) enclosure.
    pub fn is_certified(&self) -> bool {
        if self.lo == self.hi {
            return self.poly.eval(&self.lo).is_zero();
        }
        sign_at(&self.poly, &self.lo) * sign_at(&self.poly, &self.hi) < 0
    }
}

/// Sign of `p(x)` as -1, 0 or 1.
pub fn sign_at(p: &Poly, x: &BigRational) -> i32 {
    sign_of(&p.eval(x))
}

fn sign_of(q: &BigRational) -> i32 {
    match q.cmp(&BigRational::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Rescales by a positive constant so coefficients stay small; signs are kept.
fn normalized(p: Poly) -> Poly {
    match p.leading() {
        None => p,
        Some(l) => {
            let s = l.abs().recip();
            p.scale(&s)
        }
    }
}

/// The Sturm sequence `p, p', -rem(p, p'), ...` up to the last nonzero term.
pub fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![normalized(p.clone())];
    let d = normalized(p.derivative());
    if d.is_zero() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]).expect("nonzero divisor");
        if r.is_zero() {
            break;
        }
        seq.push(normalized(-&r));
    }
    seq
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut v = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

fn variations_at(seq: &[Poly], x: &BigRational) -> usize {
    variations(seq.iter().map(|p| sign_at(p, x)))
}

fn variations_at_infinity(seq: &[Poly], positive: bool) -> usize {
    variations(seq.iter().map(|p| {
        let s = sign_of(p.leading().unwrap());
        let odd = p.degree().unwrap() % 2 == 1;
        if !positive && odd {
            -s
        } else {
            s
        }
    }))
}

/// Number of distinct real roots of a nonzero polynomial.
pub fn count_real_roots(p: &Poly) -> Result<usize> {
    if p.is_zero() {
        return Err(domain("root count of the zero polynomial"));
    }
    let seq = sturm_sequence(&p.squarefree_part()?);
    Ok(variations_at_infinity(&seq, false) - variations_at_infinity(&seq, true))
}

/// Cauchy bound: every root satisfies `|x| < 1 + max |a_i / a_n|`.
fn root_bound(p: &Poly) -> BigRational {
    let l = p.leading().unwrap().abs();
    let m = p
        .coeffs()
        .iter()
        .map(|c| c.abs() / &l)
        .max()
        .unwrap_or_else(BigRational::zero);
    m + BigRational::from_integer(BigInt::from(2))
}

/// A split point in `(lo, hi)` that is not a root of `p`.
fn split_point(p: &Poly, lo: &BigRational, hi: &BigRational) -> BigRational {
    let w = hi - lo;
    let mut k = 2i64;
    loop {
        let m = lo + &w * rat(k / 2, k) + &w * rat(1, 97 * k);
        if &m < hi && &m > lo && !p.eval(&m).is_zero() {
            return m;
        }
        k += 1;
    }
}

/// Isolating intervals `(lo, hi]` each holding exactly one root.
fn isolate(seq: &[Poly]) -> Vec<(BigRational, BigRational)> {
    let p = &seq[0];
    let b = root_bound(p);
    let mut stack = vec![(-b.clone(), b)];
    let mut out = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let n = variations_at(seq, &lo) - variations_at(seq, &hi);
        match n {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let m = split_point(p, &lo, &hi);
                stack.push((lo, m.clone()));
                stack.push((m, hi));
            }
        }
    }
    out.sort();
    out
}

fn pow10(e: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(10).pow(e))
}

/// Bisects `[lo, hi]` (sign change, no root at the ends) until narrower than `w`.
fn bisect(p: &Poly, lo: &mut BigRational, hi: &mut BigRational, w: &BigRational) -> bool {
    let s_lo = sign_at(p, lo);
    while &(&*hi - &*lo) >= w {
        let m = (&*lo + &*hi) / rat(2, 1);
        let s = sign_at(p, &m);
        if s == 0 {
            *lo = m.clone();
            *hi = m;
            return true;
        }
        if s == s_lo {
            *lo = m;
        } else {
            *hi = m;
        }
    }
    false
}

/// Newton from the interval midpoint, falling back to exact bisection when an
/// iterate leaves the enclosure. Ends with a certified sign check at
/// `value +- eps`.
fn refine(p: &Poly, mut lo: BigRational, mut hi: BigRational, prec: Precision) -> IsolatedRoot {
    let mk = |lo: BigRational, hi: BigRational, value: BigReal| IsolatedRoot {
        lo,
        hi,
        value,
        poly: p.clone(),
    };
    if sign_at(p, &hi) == 0 {
        return mk(hi.clone(), hi.clone(), BigReal::from_rational(&hi, prec));
    }
    if bisect(p, &mut lo, &mut hi, &rat(1, 1000)) {
        return mk(lo.clone(), hi, BigReal::from_rational(&lo, prec));
    }
    let eps = pow10(prec.digits()).recip() / rat(2, 1);
    let work = prec.scaled(1.25);
    let dp = p.derivative();
    let lo_r = BigReal::from_rational(&lo, work);
    let hi_r = BigReal::from_rational(&hi, work);
    let stop = BigReal::from_rational(&(pow10(prec.digits() + 5).recip()), work);
    let mut x = BigReal::from_rational(&((&lo + &hi) / rat(2, 1)), work);
    let mut converged = false;
    for _ in 0..200 {
        let d = dp.eval_real(&x);
        if d.is_zero() {
            break;
        }
        let step = p.eval_real(&x) / d;
        let next = &x - &step;
        if next < lo_r || next > hi_r {
            break;
        }
        x = next;
        if step.abs() < stop {
            converged = true;
            break;
        }
    }
    if converged {
        let v = x.to_rational();
        let (a, b) = (&v - &eps, &v + &eps);
        let (sa, sb) = (sign_at(p, &a), sign_at(p, &b));
        if sa * sb < 0 && a >= lo && b <= hi {
            return mk(a, b, x.with_precision(prec));
        }
    }
    // Newton did not certify: bisect exactly the whole way.
    let w = &eps * rat(2, 1);
    if bisect(p, &mut lo, &mut hi, &w) {
        return mk(lo.clone(), hi, BigReal::from_rational(&lo, prec));
    }
    let mid = (&lo + &hi) / rat(2, 1);
    mk(lo, hi, BigReal::from_rational(&mid, prec))
}

/// All distinct real roots of `p`, ascending, each enclosed in an interval of
/// width at most `10^-digits` on which the squarefree part changes sign.
pub fn real_roots(p: &Poly, prec: Precision) -> Result<Vec<IsolatedRoot>> {
    if p.is_zero() {
        return Err(domain("real roots of the zero polynomial"));
    }
    let sq = p.squarefree_part()?;
    if sq.degree() == Some(0) {
        return Ok(vec![]);
    }
    let seq = sturm_sequence(&sq);
    let intervals = isolate(&seq);
    let sq_ref = &sq;
    Ok(crate::par::map(&intervals, |(lo, hi)| {
        refine(sq_ref, lo.clone(), hi.clone(), prec)
    }))
}
