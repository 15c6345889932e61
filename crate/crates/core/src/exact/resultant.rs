use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{valuation, BiPoly, Poly};
use crate::error::{domain, Result};

type IntPoly = Vec<BigInt>;

fn trim(mut p: IntPoly) -> IntPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn deg(p: &IntPoly) -> usize {
    p.len() - 1
}

fn content(p: &IntPoly) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`, exact over Z.
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = deg(b);
    let lb = &b[db];
    let mut r = a.clone();
    let mut e = deg(a) + 1 - db;
    while !r.is_empty() && r.len() > db {
        let dr = deg(&r);
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, c) in b.iter().enumerate() {
            r[dr - db + j] -= &lr * c;
        }
        r = trim(r);
        e -= 1;
    }
    let f = lb.pow(e as u32);
    r.into_iter().map(|c| c * &f).collect()
}

/// Resultant of two integer polynomials by the subresultant PRS.
///
/// Coefficient growth stays polynomial because each remainder is divided by
/// the known subresultant factor `g * h^delta`.
pub fn resultant(a: &Poly, b: &Poly) -> Result<BigInt> {
    if a.is_zero() || b.is_zero() {
        return Err(domain("resultant of the zero polynomial"));
    }
    let ia = a
        .integer_coeffs()
        .ok_or_else(|| domain("resultant expects integer coefficients"))?;
    let ib = b
        .integer_coeffs()
        .ok_or_else(|| domain("resultant expects integer coefficients"))?;
    Ok(subresultant(ia, ib))
}

fn subresultant(a: IntPoly, b: IntPoly) -> BigInt {
    let (ca, cb) = (content(&a), content(&b));
    let mut a: IntPoly = a.into_iter().map(|c| c / &ca).collect();
    let mut b: IntPoly = b.into_iter().map(|c| c / &cb).collect();
    let t = ca.pow(deg(&b) as u32) * cb.pow(deg(&a) as u32);
    let mut s = BigInt::one();
    if deg(&a) < deg(&b) {
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    while deg(&b) > 0 {
        let delta = (deg(&a) - deg(&b)) as u32;
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -s;
        }
        let r = trim(pseudo_rem(&a, &b));
        if r.is_empty() {
            return BigInt::zero();
        }
        let div = &g * h.pow(delta);
        a = b;
        b = r.into_iter().map(|c| c / &div).collect();
        g = a[deg(&a)].clone();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h
        } else {
            g.pow(delta) / h.pow(delta - 1)
        };
    }
    // deg b == 0
    let da = deg(&a) as u32;
    let lb = &b[0];
    let h_final = if da == 0 {
        BigInt::one()
    } else {
        lb.pow(da) / h.pow(da - 1)
    };
    s * t * h_final
}

/// `X^power * h(X, c/X)` as a polynomial in X.
///
/// Fails when the Y-degree of `h` exceeds `power`, since the result would not
/// be a polynomial.
pub fn substitute_and_clear(h: &BiPoly, c: &BigRational, power: u32) -> Result<Poly> {
    if let Some(dy) = h.degree_y() {
        if dy > power {
            return Err(domain(format!(
                "Y-degree {dy} exceeds the clearing power {power}"
            )));
        }
    }
    let mut coeffs: Vec<BigRational> = Vec::new();
    for (&(i, j), a) in h.terms() {
        let e = (i + power - j) as usize;
        if coeffs.len() <= e {
            coeffs.resize(e + 1, BigRational::zero());
        }
        let cj = (0..j).fold(BigRational::one(), |acc, _| acc * c);
        coeffs[e] += a * cj;
    }
    Ok(Poly::new(coeffs))
}

/// Minimum `p`-adic valuation over the coefficients of an integer polynomial.
pub fn content_valuation(a: &Poly, p: u64) -> Result<u32> {
    let cs = a
        .integer_coeffs()
        .ok_or_else(|| domain("content valuation expects integer coefficients"))?;
    cs.iter()
        .filter_map(|c| valuation(c, p))
        .min()
        .ok_or_else(|| domain("content valuation of the zero polynomial"))
}

/// Same as [`content_valuation`] for a bivariate integer polynomial.
pub fn content_valuation_bi(a: &BiPoly, p: u64) -> Result<u32> {
    if !a.is_integral() {
        return Err(domain("content valuation expects integer coefficients"));
    }
    a.terms()
        .filter_map(|(_, c)| valuation(&c.to_integer(), p))
        .min()
        .ok_or_else(|| domain("content valuation of the zero polynomial"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn linear_resultants() {
        let a = Poly::from_ints(&[-2, 1]);
        let b = Poly::from_ints(&[-3, 1]);
        assert_eq!(resultant(&a, &b).unwrap(), int(-1));
        assert_eq!(resultant(&Poly::x(), &Poly::x()).unwrap(), int(0));
        assert!(resultant(&Poly::zero(), &a).is_err());
    }

    #[test]
    fn constants_and_degree_zero() {
        let c = Poly::from_ints(&[5]);
        let p = Poly::from_ints(&[1, 0, 1]);
        assert_eq!(resultant(&c, &p).unwrap(), int(25));
        assert_eq!(resultant(&p, &c).unwrap(), int(25));
        assert_eq!(resultant(&c, &Poly::from_ints(&[7])).unwrap(), int(1));
    }

    #[test]
    fn res_with_x_is_constant_term_up_to_sign() {
        // res(p, X) = (-1)^deg p * p(0) for monic p
        let p = Poly::from_ints(&[-121, -121, 0, 33, 11, 1]);
        assert_eq!(resultant(&p, &Poly::x()).unwrap(), int(121));
        assert_eq!(resultant(&Poly::x(), &p).unwrap(), int(-121));
    }

    #[test]
    fn substitution() {
        let y = BiPoly::y();
        assert_eq!(substitute_and_clear(&y, &rat(11, 1), 1).unwrap(), Poly::from_ints(&[11]));
        let xy = &(BiPoly::x() * BiPoly::y()) - &BiPoly::from_ints(&[(0, 0, 11)]);
        assert!(substitute_and_clear(&xy, &rat(11, 1), 1).unwrap().is_zero());
        assert!(substitute_and_clear(&y.pow(3), &rat(11, 1), 2).is_err());
    }

    #[test]
    fn valuations_of_content() {
        assert_eq!(content_valuation(&Poly::from_ints(&[121, 11]), 11).unwrap(), 1);
        assert_eq!(content_valuation(&Poly::from_ints(&[1, 1]), 11).unwrap(), 0);
        assert!(content_valuation(&Poly::zero(), 11).is_err());
    }
}
