use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::BigReal;
use crate::error::{Error, Result};

/// The `k`-th convergent `p/q` with partial quotient `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub a: BigInt,
    pub p: BigInt,
    pub q: BigInt,
}

/// Certified convergents of a real number known up to an error radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    /// Convergents whose partial quotients are shared by every real in the
    /// input enclosure, indexed from 0 (so `a_0 = floor(alpha)`).
    pub convergents: Vec<Convergent>,
    /// First index whose partial quotient the input does not determine, if
    /// the expansion stopped there.
    pub first_uncertified: Option<usize>,
    /// First index with `q_k >= q_cap`, when reached.
    pub cap_index: Option<usize>,
    /// A certified lower bound for `q` at [`CfExpansion::cap_index`]; equals
    /// the exact `q` when that convergent is itself certified.
    pub cap_q_lower: Option<BigInt>,
}

/// Partial-quotient stream of an exact rational.
struct Quotients {
    num: BigInt,
    den: BigInt,
}

impl Iterator for Quotients {
    type Item = BigInt;
    fn next(&mut self) -> Option<BigInt> {
        if self.den.is_zero() {
            return None;
        }
        let (a, r) = self.num.div_mod_floor(&self.den);
        self.num = std::mem::replace(&mut self.den, r);
        Some(a)
    }
}

fn quotients(x: &BigRational) -> Quotients {
    Quotients {
        num: x.numer().clone(),
        den: x.denom().clone(),
    }
}

struct Recurrence {
    p: (BigInt, BigInt),
    q: (BigInt, BigInt),
}

impl Recurrence {
    fn new() -> Self {
        // (p_{-1}, p_{-2}) = (1, 0), (q_{-1}, q_{-2}) = (0, 1)
        Recurrence {
            p: (BigInt::one(), BigInt::zero()),
            q: (BigInt::zero(), BigInt::one()),
        }
    }

    fn peek_q(&self, a: &BigInt) -> BigInt {
        a * &self.q.0 + &self.q.1
    }

    fn push(&mut self, a: &BigInt) -> (BigInt, BigInt) {
        let p = a * &self.p.0 + &self.p.1;
        let q = a * &self.q.0 + &self.q.1;
        self.p = (p.clone(), std::mem::take(&mut self.p.0));
        self.q = (q.clone(), std::mem::take(&mut self.q.0));
        (p, q)
    }
}

/// All convergents of an exact rational, up to `max_terms`.
pub fn continued_fraction_exact(x: &BigRational, max_terms: usize) -> Vec<Convergent> {
    let mut rec = Recurrence::new();
    quotients(x)
        .take(max_terms)
        .enumerate()
        .map(|(index, a)| {
            let (p, q) = rec.push(&a);
            Convergent { index, a, p, q }
        })
        .collect()
}

/// Convergents of `alpha`, treated as any real in `[alpha - radius, alpha + radius]`.
///
/// Expands both endpoints and keeps the common prefix. Stops after
/// `max_terms` or at the first `q_k >= q_cap`. When the endpoints split
/// before either, the returned error reports the index; when they split at
/// the cap index itself, the smaller of the two candidate quotients still
/// gives a certified lower bound for `q_k` and the expansion succeeds.
pub fn continued_fraction(
    alpha: &BigReal,
    radius: &BigRational,
    max_terms: usize,
    q_cap: &BigInt,
) -> Result<CfExpansion> {
    if !alpha.is_positive() {
        return Err(Error::Precondition("continued fraction needs alpha > 0".into()));
    }
    let mid = alpha.to_rational();
    let lo = &mid - radius;
    let hi = &mid + radius;
    let mut qa = quotients(&lo);
    let mut qb = quotients(&hi);
    let mut rec = Recurrence::new();
    let mut out = CfExpansion {
        convergents: vec![],
        first_uncertified: None,
        cap_index: None,
        cap_q_lower: None,
    };
    for index in 0..max_terms {
        let (a, b) = match (qa.next(), qb.next()) {
            (Some(a), Some(b)) => (a, b),
            (None, None) if radius.is_zero() => return Ok(out),
            (a, b) => {
                // one side terminated: only a single-point enclosure is exact
                out.first_uncertified = Some(index);
                let cand = [a, b].into_iter().flatten().min().unwrap_or_else(BigInt::one);
                return finish_split(out, index, rec.peek_q(&cand.max(BigInt::one())), q_cap);
            }
        };
        if a != b {
            out.first_uncertified = Some(index);
            let low = a.min(b).max(BigInt::one());
            return finish_split(out, index, rec.peek_q(&low), q_cap);
        }
        let (p, q) = rec.push(&a);
        let reached = &q >= q_cap;
        out.convergents.push(Convergent {
            index,
            a,
            p,
            q: q.clone(),
        });
        if reached {
            out.cap_index = Some(index);
            out.cap_q_lower = Some(q);
            return Ok(out);
        }
    }
    Ok(out)
}

fn finish_split(
    mut out: CfExpansion,
    index: usize,
    q_lower: BigInt,
    q_cap: &BigInt,
) -> Result<CfExpansion> {
    if &q_lower >= q_cap {
        out.cap_index = Some(index);
        out.cap_q_lower = Some(q_lower);
        return Ok(out);
    }
    Err(Error::InsufficientPrecision(format!(
        "partial quotient {index} is not determined by the input (last certified q = {})",
        out.convergents.last().map(|c| c.q.to_string()).unwrap_or_default()
    )))
}

impl Convergent {
    /// `|alpha - p/q|` as an exact rational against another rational.
    pub fn error_against(&self, x: &BigRational) -> BigRational {
        (x - BigRational::new(self.p.clone(), self.q.clone())).abs()
    }
}
