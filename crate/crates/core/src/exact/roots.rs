use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Poly;
use crate::error::{domain, Result};

/// Largest `|n|` accepted by [`divisors`]; trial division beyond this is
/// not a reasonable plan.
const DIVISOR_LIMIT: u64 = 1 << 50;

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    if n.is_zero() {
        return Err(domain("divisors of zero"));
    }
    let m = n
        .abs()
        .to_u64()
        .filter(|&m| m <= DIVISOR_LIMIT)
        .ok_or_else(|| domain("integer too large for divisor enumeration"))?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    Ok(small
        .into_iter()
        .chain(large.into_iter().rev())
        .map(BigInt::from)
        .collect())
}

/// All rational roots of a nonzero polynomial, sorted, without multiplicity.
///
/// Candidates `±a/b` come from divisors `a` of the trailing and `b` of the
/// leading coefficient of the primitive integer model.
pub fn rational_roots(p: &Poly) -> Result<Vec<BigRational>> {
    if p.is_zero() {
        return Err(domain("rational roots of the zero polynomial"));
    }
    let ints = p.primitive_integer();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap();
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(BigRational::zero());
    }
    let reduced = Poly::from_bigints(&ints[low..]);
    if reduced.degree() == Some(0) {
        return Ok(roots);
    }
    let a0 = &ints[low];
    let an = ints.last().unwrap();
    let nums = divisors(a0)?;
    let dens = divisors(an)?;
    for a in &nums {
        for b in &dens {
            if !a.gcd(b).is_one() {
                continue;
            }
            for s in [a.clone(), -a] {
                let q = BigRational::new(s, b.clone());
                if reduced.eval(&q).is_zero() {
                    roots.push(q);
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots)
}
