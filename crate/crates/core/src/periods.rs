//! Real period and elliptic logarithms of real points.
//!
//! Normalization: `Omega = int_c^oo dx / sqrt(q(x))` with `q` the completed
//! square cubic and `c` its real root, and `lambda(P) = int_oo^P dx/(2y + a1 x + a3)`
//! reduced to `[0, Omega)`. This is the PARI convention; the period of
//! the full lattice generator is twice as large.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::curve::{RationalPoint, WeierstrassModel};
use crate::error::{domain, Error, Result};
use crate::real::{real_roots, BigReal, DecimalReal, Precision};

/// Extra digits carried inside the AGM iterations.
const WORK_DIGITS: u32 = 10;

/// Maximum AGM steps; convergence is quadratic so this is never reached.
const MAX_AGM_STEPS: usize = 200;

/// Period data of a model with one real component.
///
/// With `c` the real root of `q`, `beta = sqrt(q'(c))` and `alpha = 3c + b2/4`,
/// the real period is `2 pi / AGM(2 sqrt(beta), sqrt(2 beta + alpha))`.
#[derive(Clone, Debug)]
pub struct PeriodLattice {
    model: WeierstrassModel,
    prec: Precision,
    work: Precision,
    c: BigReal,
    beta: BigReal,
    alpha: BigReal,
    omega: BigReal,
}

/// An elliptic logarithm with its point and working precision.
#[derive(Clone, Debug, Serialize)]
pub struct EllipticLog {
    pub point: RationalPoint,
    #[serde(serialize_with = "ser_real")]
    pub value: BigReal,
    pub precision: Precision,
}

fn ser_real<S: serde::Serializer>(v: &BigReal, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.to_record().serialize(s)
}

fn eps(p: Precision) -> BigReal {
    BigReal::from_rational(&BigReal::ulp_radius(p, 0), p).div_int(&BigInt::from(100_000))
}

impl PeriodLattice {
    pub fn new(model: &WeierstrassModel, prec: Precision) -> Result<Self> {
        let work = Precision::new(prec.digits() + WORK_DIGITS)?;
        let q = model.completed_square_cubic();
        let roots = real_roots(&q, work)?;
        if roots.len() != 1 {
            return Err(Error::Unsupported(format!(
                "model has {} real 2-division points; only one real component is handled",
                roots.len()
            )));
        }
        let c = roots[0].value.clone();
        let dq = q.derivative().eval_real(&c);
        let beta = dq.sqrt();
        let b2 = BigReal::from_rational(&q.coeff(2), work);
        let alpha = c.mul_int(&BigInt::from(3)) + b2;
        let two = BigInt::from(2);
        let a0 = beta.sqrt().mul_int(&two);
        let b0 = (beta.mul_int(&two) + &alpha).sqrt();
        let m = agm(a0, b0, work);
        let omega = BigReal::pi(work).mul_int(&two) / m;
        Ok(PeriodLattice {
            model: model.clone(),
            prec,
            work,
            c,
            beta,
            alpha,
            omega,
        })
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn model(&self) -> &WeierstrassModel {
        &self.model
    }

    /// The real period `Omega` at the requested precision.
    pub fn omega(&self) -> BigReal {
        self.omega.with_precision(self.prec)
    }

    /// The real root `c` of the completed-square cubic.
    pub fn real_root(&self) -> BigReal {
        self.c.with_precision(self.prec)
    }

    /// `int_x^oo dt / (2 sqrt(q(t)))` for real `x > c`, by AGM descent.
    fn tail_integral(&self, x: &BigReal) -> BigReal {
        let w = self.work;
        let two = BigInt::from(2);
        let u = x.with_precision(w) - &self.c;
        let su = u.sqrt();
        let mut a = self.beta.sqrt().mul_int(&two);
        let mut b = (self.beta.mul_int(&two) + &self.alpha).sqrt();
        let mut c = (&u + &self.beta) / &su;
        let tol = eps(w);
        for _ in 0..MAX_AGM_STEPS {
            if (&a - &b).abs() <= tol {
                break;
            }
            let disc = &c * &c + &b * &b - &a * &a;
            let disc = if disc.is_negative() { BigReal::zero(w) } else { disc };
            let c2 = (&c + disc.sqrt()).div_int(&two);
            let a2 = (&a + &b).div_int(&two);
            let b2 = (&a * &b).sqrt();
            a = a2;
            b = b2;
            c = c2;
        }
        let z = (&a / &c).asin() / &a;
        if u < self.beta {
            self.omega.div_int(&two) - z
        } else {
            z
        }
    }

    /// `lambda` of the real point with abscissa `x` on the branch where
    /// `w = 2y + a1 x + a3` has the given sign.
    pub fn log_from_branch(&self, x: &BigReal, w_sign: i32) -> Result<BigReal> {
        if x.with_precision(self.work) <= self.c {
            return Err(domain("abscissa lies left of the real locus"));
        }
        let i = self.tail_integral(x);
        let v = match w_sign {
            s if s > 0 => &self.omega - &i,
            s if s < 0 => i,
            _ => self.omega.div_int(&BigInt::from(2)),
        };
        Ok(v.with_precision(self.prec))
    }

    /// Elliptic logarithm of a rational point, in `[0, Omega)`.
    pub fn elliptic_log(&self, p: &RationalPoint) -> Result<EllipticLog> {
        if !self.model.contains(p) {
            return Err(domain(format!("point {p} is not on the curve")));
        }
        let value = match p {
            RationalPoint::Infinity => BigReal::zero(self.prec),
            RationalPoint::Affine { x, y } => {
                let [a1, _, a3, _, _] = self.model.coefficients();
                let w = BigRational::from_integer(BigInt::from(2)) * y
                    + BigRational::from_integer(a1.clone()) * x
                    + BigRational::from_integer(a3.clone());
                let sign = if w.is_zero() {
                    0
                } else if w > BigRational::zero() {
                    1
                } else {
                    -1
                };
                self.log_from_branch(&BigReal::from_rational(x, self.work), sign)?
            }
        };
        Ok(EllipticLog {
            point: p.clone(),
            value,
            precision: self.prec,
        })
    }

    /// Elliptic logarithm of a real point given by approximate coordinates,
    /// which must satisfy the curve equation to `prec - 10` digits.
    pub fn elliptic_log_real(&self, x: &BigReal, y: &BigReal) -> Result<BigReal> {
        let [a1, a2, a3, a4, a6] = self.model.coefficients().clone().map(|c| BigReal::from_int(&c, self.work));
        let (x, y) = (x.with_precision(self.work), y.with_precision(self.work));
        let lhs = &y * &y + &a1 * &x * &y + &a3 * &y;
        let rhs = &x * &x * &x + &a2 * &x * &x + &a4 * &x + a6;
        let digits = self.prec.digits().saturating_sub(10);
        if !lhs.agrees_with(&rhs, digits) {
            return Err(domain("real point is not on the curve to working precision"));
        }
        let w = y.mul_int(&BigInt::from(2)) + &a1 * &x + a3;
        self.log_from_branch(&x, w.signum())
    }

    /// Reduces a real number into `[0, Omega)`.
    pub fn reduce(&self, v: &BigReal) -> BigReal {
        let om = self.omega.with_precision(v.precision());
        let k = (v / &om).floor();
        let r = v - &om.mul_int(&k);
        if r.is_negative() {
            r + om
        } else {
            r
        }
    }

    /// Distance from `v` to the nearest multiple of `Omega`.
    pub fn distance_to_lattice(&self, v: &BigReal) -> BigReal {
        let r = self.reduce(v);
        let om = self.omega.with_precision(v.precision());
        let s = &om - &r;
        if s < r {
            s
        } else {
            r
        }
    }
}

fn agm(mut a: BigReal, mut b: BigReal, w: Precision) -> BigReal {
    let tol = eps(w);
    let two = BigInt::from(2);
    for _ in 0..MAX_AGM_STEPS {
        if (&a - &b).abs() <= tol {
            break;
        }
        let a2 = (&a + &b).div_int(&two);
        b = (&a * &b).sqrt();
        a = a2;
    }
    a
}

/// `Omega` of a model with one real component.
pub fn real_period(model: &WeierstrassModel, prec: Precision) -> Result<BigReal> {
    Ok(PeriodLattice::new(model, prec)?.omega())
}

/// `lambda(P)` in `[0, Omega)`.
pub fn elliptic_log(model: &WeierstrassModel, p: &RationalPoint, prec: Precision) -> Result<EllipticLog> {
    PeriodLattice::new(model, prec)?.elliptic_log(p)
}

impl EllipticLog {
    pub fn record(&self) -> DecimalReal {
        self.value.to_record()
    }
}
