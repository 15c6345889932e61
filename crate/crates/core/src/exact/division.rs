use num_rational::BigRational;

use super::Poly;
use crate::curve::WeierstrassModel;
use crate::error::{Error, Result};

/// Division polynomials of a long Weierstrass model with `Y` eliminated.
///
/// Odd `psi_n` are polynomials in `x`. Even `psi_n` equal `psi_2 * f_n`
/// with `f_n` a polynomial in `x`, and `psi_2^2 = 4x^3 + b2 x^2 + 2 b4 x + b6`.
#[derive(Clone, Debug)]
pub struct DivisionPolynomials {
    /// `parts[n]` is `psi_n` for odd `n` and `f_n` for even `n`.
    parts: Vec<Poly>,
    psi2_sq: Poly,
}

impl DivisionPolynomials {
    /// Builds `psi_0, ..., psi_n` by the standard recurrences.
    pub fn new(model: &WeierstrassModel, n: usize) -> Self {
        let [b2, b4, b6, b8] = model.b_invariants();
        let r = |q: &num_bigint::BigInt| BigRational::from_integer(q.clone());
        let c = |k: i64| BigRational::from_integer(k.into());
        let psi2_sq = Poly::new(vec![r(&b6), r(&b4) * c(2), r(&b2), c(4)]);
        let psi3 = Poly::new(vec![r(&b8), r(&b6) * c(3), r(&b4) * c(3), r(&b2), c(3)]);
        let f4 = Poly::new(vec![
            r(&(&b4 * &b8 - &b6 * &b6)),
            r(&(&b2 * &b8 - &b4 * &b6)),
            r(&b8) * c(10),
            r(&b6) * c(10),
            r(&b4) * c(5),
            r(&b2),
            c(2),
        ]);
        let mut parts = vec![Poly::zero(), Poly::one(), Poly::one(), psi3, f4];
        let b_sq = &psi2_sq * &psi2_sq;
        for k in 5..=n.max(4) {
            let m = k / 2;
            let p = |i: usize| &parts[i];
            let next = if k % 2 == 1 {
                // psi_{2m+1} = psi_{m+2} psi_m^3 - psi_{m-1} psi_{m+1}^3
                let a = p(m + 2) * &p(m).pow(3);
                let b = p(m - 1) * &p(m + 1).pow(3);
                if m % 2 == 0 {
                    &(&b_sq * &a) - &b
                } else {
                    &a - &(&b_sq * &b)
                }
            } else {
                // psi_{2m} psi_2 = psi_m (psi_{m+2} psi_{m-1}^2 - psi_{m-2} psi_{m+1}^2)
                let inner = &(p(m + 2) * &p(m - 1).pow(2)) - &(p(m - 2) * &p(m + 1).pow(2));
                p(m) * &inner
            };
            parts.push(next);
        }
        parts.truncate(n.max(4) + 1);
        DivisionPolynomials { parts, psi2_sq }
    }

    /// `psi_n` for odd `n`.
    pub fn odd(&self, n: usize) -> Option<&Poly> {
        (n % 2 == 1).then(|| self.parts.get(n)).flatten()
    }

    /// `psi_n / psi_2` for even `n`.
    pub fn even_quotient(&self, n: usize) -> Option<&Poly> {
        (n % 2 == 0).then(|| self.parts.get(n)).flatten()
    }

    /// `psi_2^2` as a cubic in `x`.
    pub fn psi2_squared(&self) -> &Poly {
        &self.psi2_sq
    }
}

/// The odd-index division polynomial `psi_n` as a polynomial in `x`.
///
/// Its degree is `(n^2 - 1) / 2` with leading coefficient `n`. Even `n`
/// would need a factor `2y + a1 x + a3` and is not supported.
pub fn division_polynomial(model: &WeierstrassModel, n: usize) -> Result<Poly> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::Unsupported(format!(
            "division polynomial of even index {n} is not univariate"
        )));
    }
    let table = DivisionPolynomials::new(model, n);
    Ok(table.odd(n).expect("table covers n").clone())
}
