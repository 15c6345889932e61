use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Poly, PolyRecord};
use crate::error::{domain, Result};

/// Sparse bivariate polynomial in `X`, `Y` with rational coefficients,
/// keyed by `(deg_x, deg_y)`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(c, 0, 0)
    }

    pub fn term(c: BigRational, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BiPoly { terms }
    }

    pub fn x() -> Self {
        Self::term(BigRational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::term(BigRational::one(), 0, 1)
    }

    /// `(i, j, c)` triples for `c X^i Y^j`.
    pub fn from_ints(terms: &[(u32, u32, i64)]) -> Self {
        terms.iter().fold(Self::zero(), |acc, &(i, j, c)| {
            &acc + &Self::term(BigRational::from_integer(c.into()), i, j)
        })
    }

    /// A polynomial in X alone, viewed as bivariate.
    pub fn from_x_poly(p: &Poly) -> Self {
        p.coeffs()
            .iter()
            .enumerate()
            .fold(Self::zero(), |acc, (i, c)| &acc + &Self::term(c.clone(), i as u32, 0))
    }

    /// `sum_j p_j(X) Y^j`.
    pub fn from_y_coeffs(ps: &[Poly]) -> Self {
        let mut out = Self::zero();
        for (j, p) in ps.iter().enumerate() {
            for (i, c) in p.coeffs().iter().enumerate() {
                out = &out + &Self::term(c.clone(), i as u32, j as u32);
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(BigRational::one()), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        // Horner in Y over coefficient polys in X
        let dy = self.degree_y().unwrap_or(0);
        let ys = self.y_coeffs();
        (0..=dy).rev().fold(BigRational::zero(), |acc, j| {
            acc * y + ys.get(j as usize).map(|p| p.eval(x)).unwrap_or_else(BigRational::zero)
        })
    }

    /// Coefficients of `Y^0, Y^1, ...` as polynomials in X.
    pub fn y_coeffs(&self) -> Vec<Poly> {
        let dy = match self.degree_y() {
            Some(d) => d as usize,
            None => return vec![],
        };
        let mut cols: Vec<Vec<BigRational>> = vec![vec![]; dy + 1];
        for (&(i, j), c) in &self.terms {
            let col = &mut cols[j as usize];
            if col.len() <= i as usize {
                col.resize(i as usize + 1, BigRational::zero());
            }
            col[i as usize] = c.clone();
        }
        cols.into_iter().map(Poly::new).collect()
    }

    /// `self(a X, b Y)`.
    pub fn scale_vars(&self, a: &BigRational, b: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            let f = pow_rat(a, i) * pow_rat(b, j);
            out = &out + &Self::term(c * f, i, j);
        }
        out
    }

    /// The part of maximal weight when `X` has weight `wx` and `Y` weight
    /// `wy`, together with that weight.
    pub fn top_weighted(&self, wx: u32, wy: u32) -> Option<(u32, BiPoly)> {
        let w = self.terms.keys().map(|&(i, j)| wx * i + wy * j).max()?;
        let mut top = Self::zero();
        for (&(i, j), c) in &self.terms {
            if wx * i + wy * j == w {
                top.terms.insert((i, j), c.clone());
            }
        }
        Some((w, top))
    }

    pub fn to_record(&self, vx: &str, vy: &str) -> PolyRecord {
        PolyRecord {
            variables: vec![vx.to_string(), vy.to_string()],
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| PolyRecord::term(vec![i, j], c))
                .collect(),
        }
    }

    pub fn from_record(r: &PolyRecord) -> Result<Self> {
        if r.variables.len() != 2 {
            return Err(domain("expected a bivariate polynomial record"));
        }
        let mut out = Self::zero();
        for (e, n, d) in &r.terms {
            let [i, j] = e.as_slice() else {
                return Err(domain("bad exponent tuple"));
            };
            out = &out + &Self::term(PolyRecord::parse_coeff(n, d)?, *i, *j);
        }
        Ok(out)
    }
}

fn pow_rat(a: &BigRational, n: u32) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, _| acc * a)
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut terms = self.terms.clone();
        for (k, c) in &rhs.terms {
            let e = terms.entry(*k).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        BiPoly { terms }
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &(-rhs)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut terms: BTreeMap<(u32, u32), BigRational> = BTreeMap::new();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                *terms.entry((i1 + i2, j1 + j2)).or_insert_with(BigRational::zero) += a * b;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        BiPoly { terms }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for BiPoly {
            type Output = BiPoly;
            fn $m(self, rhs: BiPoly) -> BiPoly { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);
