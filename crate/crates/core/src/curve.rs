//! Exact arithmetic on long Weierstrass models over Q, plus the functions
//! `t = Y - 11/X` and `k = 1/t = X/(XY - 11)` on the default model.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{format_rational, parse_rational, rational_roots, rat, BiPoly, Poly};

/// `Y^2 + a1 XY + a3 Y = X^3 + a2 X^2 + a4 X + a6` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "ModelRecord", try_from = "ModelRecord")]
pub struct WeierstrassModel {
    a: [BigInt; 5],
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    a1: String,
    a2: String,
    a3: String,
    a4: String,
    a6: String,
}

impl From<WeierstrassModel> for ModelRecord {
    fn from(m: WeierstrassModel) -> Self {
        let [a1, a2, a3, a4, a6] = m.a.map(|c| c.to_string());
        ModelRecord { a1, a2, a3, a4, a6 }
    }
}

impl TryFrom<ModelRecord> for WeierstrassModel {
    type Error = Error;
    fn try_from(r: ModelRecord) -> Result<Self> {
        let p = |s: &str| -> Result<BigInt> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {s:?}")))
        };
        WeierstrassModel::from_bigints([p(&r.a1)?, p(&r.a2)?, p(&r.a3)?, p(&r.a4)?, p(&r.a6)?])
    }
}

impl WeierstrassModel {
    /// `[a1, a2, a3, a4, a6]`; fails for singular models.
    pub fn new(a: [i64; 5]) -> Result<Self> {
        Self::from_bigints(a.map(BigInt::from))
    }

    pub fn from_bigints(a: [BigInt; 5]) -> Result<Self> {
        let m = WeierstrassModel { a };
        if m.discriminant().is_zero() {
            return Err(domain("singular Weierstrass model"));
        }
        Ok(m)
    }

    /// `Y^2 + 11Y = X^3 + 11X^2 + 33X`.
    pub fn xns11() -> Self {
        Self::new([0, 11, 11, 33, 0]).expect("nonsingular")
    }

    pub fn coefficients(&self) -> &[BigInt; 5] {
        &self.a
    }

    /// `[b2, b4, b6, b8]`.
    pub fn b_invariants(&self) -> [BigInt; 4] {
        let [a1, a2, a3, a4, a6] = &self.a;
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        [b2, b4, b6, b8]
    }

    pub fn c4(&self) -> BigInt {
        let [b2, b4, _, _] = self.b_invariants();
        &b2 * &b2 - 24 * b4
    }

    pub fn c6(&self) -> BigInt {
        let [b2, b4, b6, _] = self.b_invariants();
        -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * b6
    }

    pub fn discriminant(&self) -> BigInt {
        let [b2, b4, b6, b8] = self.b_invariants();
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    pub fn j_invariant(&self) -> BigRational {
        let c4 = self.c4();
        BigRational::new(&c4 * &c4 * &c4, self.discriminant())
    }

    /// `F(X, Y) = Y^2 + a1 XY + a3 Y - X^3 - a2 X^2 - a4 X - a6`.
    pub fn curve_polynomial(&self) -> BiPoly {
        let r = |c: &BigInt| BigRational::from_integer(c.clone());
        let [a1, a2, a3, a4, a6] = &self.a;
        let one = BigRational::one();
        let mut f = BiPoly::term(one.clone(), 0, 2);
        for (c, i, j) in [(r(a1), 1, 1), (r(a3), 0, 1)] {
            f = &f + &BiPoly::term(c, i, j);
        }
        for (c, i) in [(one, 3), (r(a2), 2), (r(a4), 1), (r(a6), 0)] {
            f = &f - &BiPoly::term(c, i, 0);
        }
        f
    }

    /// The cubic `x^3 + (b2/4) x^2 + (b4/2) x + b6/4` equal to `((2y + a1 x + a3)/2)^2`.
    pub fn completed_square_cubic(&self) -> Poly {
        let [b2, b4, b6, _] = self.b_invariants();
        Poly::new(vec![
            BigRational::new(b6, 4.into()),
            BigRational::new(b4, 2.into()),
            BigRational::new(b2, 4.into()),
            BigRational::one(),
        ])
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        match p {
            RationalPoint::Infinity => true,
            RationalPoint::Affine { x, y } => self.curve_polynomial().eval(x, y).is_zero(),
        }
    }

    fn check(&self, p: &RationalPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(domain(format!("point {p} is not on the curve")))
        }
    }

    /// The isomorphic model under `x = x' + r`, `y = y' + s x' + t`.
    pub fn transform(&self, r: i64, s: i64, t: i64) -> WeierstrassModel {
        let (r, s, t) = (BigInt::from(r), BigInt::from(s), BigInt::from(t));
        let [a1, a2, a3, a4, a6] = &self.a;
        let n1 = a1 + 2 * &s;
        let n2 = a2 - &s * a1 + 3 * &r - &s * &s;
        let n3 = a3 + &r * a1 + 2 * &t;
        let n4 = a4 - &s * a3 + 2 * &r * a2 - (&t + &r * &s) * a1 + 3 * &r * &r - 2 * &s * &t;
        let n6 = a6 + &r * a4 + &r * &r * a2 + &r * &r * &r - &t * a3 - &t * &t - &r * &t * a1;
        WeierstrassModel { a: [n1, n2, n3, n4, n6] }
    }

    /// Image of `p` under [`WeierstrassModel::transform`] with the same `(r, s, t)`.
    pub fn transform_point(p: &RationalPoint, r: i64, s: i64, t: i64) -> RationalPoint {
        match p {
            RationalPoint::Infinity => RationalPoint::Infinity,
            RationalPoint::Affine { x, y } => {
                let x2 = x - rat(r, 1);
                let y2 = y - rat(s, 1) * &x2 - rat(t, 1);
                RationalPoint::Affine { x: x2, y: y2 }
            }
        }
    }

    pub fn negate(&self, p: &RationalPoint) -> Result<RationalPoint> {
        self.check(p)?;
        Ok(self.negate_unchecked(p))
    }

    fn negate_unchecked(&self, p: &RationalPoint) -> RationalPoint {
        match p {
            RationalPoint::Infinity => RationalPoint::Infinity,
            RationalPoint::Affine { x, y } => {
                let [a1, _, a3, _, _] = self.rat_coeffs();
                RationalPoint::Affine {
                    x: x.clone(),
                    y: -y - a1 * x - a3,
                }
            }
        }
    }

    fn rat_coeffs(&self) -> [BigRational; 5] {
        self.a.clone().map(BigRational::from_integer)
    }

    pub fn add(&self, p: &RationalPoint, q: &RationalPoint) -> Result<RationalPoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    fn add_unchecked(&self, p: &RationalPoint, q: &RationalPoint) -> RationalPoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (RationalPoint::Infinity, _) => return q.clone(),
            (_, RationalPoint::Infinity) => return p.clone(),
            (RationalPoint::Affine { x: x1, y: y1 }, RationalPoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let [a1, a2, a3, a4, a6] = self.rat_coeffs();
        let (lam, nu) = if x1 == x2 {
            let den = y1 + y2 + &a1 * x2 + &a3;
            if den.is_zero() {
                return RationalPoint::Infinity;
            }
            let den = rat(2, 1) * y1 + &a1 * x1 + &a3;
            let num_l = rat(3, 1) * x1 * x1 + rat(2, 1) * &a2 * x1 + &a4 - &a1 * y1;
            let num_n = -(x1 * x1 * x1) + &a4 * x1 + rat(2, 1) * &a6 - &a3 * y1;
            (num_l / &den, num_n / &den)
        } else {
            let dx = x2 - x1;
            ((y2 - y1) / &dx, (y1 * x2 - y2 * x1) / &dx)
        };
        let x3 = &lam * &lam + &a1 * &lam - &a2 - x1 - x2;
        let y3 = -(&lam + &a1) * &x3 - nu - a3;
        RationalPoint::Affine { x: x3, y: y3 }
    }

    /// `m * p` by double-and-add.
    pub fn mul(&self, m: i64, p: &RationalPoint) -> Result<RationalPoint> {
        self.check(p)?;
        let base = if m < 0 {
            self.negate_unchecked(p)
        } else {
            p.clone()
        };
        let mut n = m.unsigned_abs();
        let mut acc = RationalPoint::Infinity;
        let mut pow = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add_unchecked(&acc, &pow);
            }
            n >>= 1;
            if n > 0 {
                pow = self.add_unchecked(&pow, &pow);
            }
        }
        Ok(acc)
    }

    /// `X^2 F(X, 11/X + s)`: a quintic whose roots are the `x` with `t = s`.
    pub fn t_level_polynomial(&self, s: &BigRational) -> Poly {
        // Y = (11 + sX)/X
        let [a1, a2, a3, a4, a6] = self.rat_coeffs();
        let num = Poly::new(vec![rat(11, 1), s.clone()]);
        let x = Poly::x();
        let x2 = &x * &x;
        let cubic = Poly::new(vec![a6, a4, a2, BigRational::one()]);
        let lhs = &(&num * &num) + &(&(&x2.scale(&a1) * &num) + &(&x.scale(&a3) * &num));
        &lhs - &(&x2 * &cubic)
    }

    /// `X^5 + 11X^4 + 33X^3 - 121X - 121` on the default model: the `x`
    /// coordinates of the zeros of `t`.
    pub fn cusp_polynomial(&self) -> Poly {
        -&self.t_level_polynomial(&BigRational::zero())
    }
}

/// A rational point of a Weierstrass model: affine with coordinates in lowest
/// terms, or the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RationalPoint {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl RationalPoint {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        RationalPoint::Affine { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self::affine(rat(x, 1), rat(y, 1))
    }

    /// `(0, 0)`, the generator of the Mordell-Weil group of the default model.
    pub fn p0() -> Self {
        Self::from_ints(0, 0)
    }

    /// Parses `"x y"` coordinates in `num/den` or decimal form.
    pub fn parse(x: &str, y: &str) -> Result<Self> {
        Ok(Self::affine(parse_rational(x)?, parse_rational(y)?))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, RationalPoint::Infinity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            RationalPoint::Affine { x, .. } => Some(x),
            RationalPoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&BigRational> {
        match self {
            RationalPoint::Affine { y, .. } => Some(y),
            RationalPoint::Infinity => None,
        }
    }

    /// `(r, s, d)` with `x = r/d^2`, `y = s/d^3`, `d > 0`; `None` at infinity
    /// or when the denominators do not have that shape.
    pub fn weighted_form(&self) -> Option<(BigInt, BigInt, BigInt)> {
        let (x, y) = (self.x()?, self.y()?);
        let d = x.denom().sqrt();
        if &(&d * &d) != x.denom() || &(&d * &d * &d) != y.denom() {
            return None;
        }
        Some((x.numer().clone(), y.numer().clone(), d))
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalPoint::Infinity => f.write_str("infinity"),
            RationalPoint::Affine { x, y } => {
                write!(f, "({}, {})", format_rational(x), format_rational(y))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Marker(String),
    Affine { x: String, y: String },
}

impl Serialize for RationalPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RationalPoint::Infinity => PointRepr::Marker("infinity".into()),
            RationalPoint::Affine { x, y } => PointRepr::Affine {
                x: format_rational(x),
                y: format_rational(y),
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match PointRepr::deserialize(d)? {
            PointRepr::Marker(m) if m == "infinity" => Ok(RationalPoint::Infinity),
            PointRepr::Marker(m) => Err(D::Error::custom(format!("unknown point marker {m:?}"))),
            PointRepr::Affine { x, y } => {
                RationalPoint::parse(&x, &y).map_err(|e| D::Error::custom(e.to_string()))
            }
        }
    }
}

/// `t(P) = y - 11/x`, or `None` at the poles `x = 0` and infinity.
pub fn t_value(p: &RationalPoint) -> Option<BigRational> {
    let x = p.x()?;
    if x.is_zero() {
        return None;
    }
    Some(p.y()? - rat(11, 1) / x)
}

/// `k(P) = x/(xy - 11)`, with `k(infinity) = 0`.
pub fn k_value(p: &RationalPoint) -> Result<BigRational> {
    match p {
        RationalPoint::Infinity => Ok(BigRational::zero()),
        RationalPoint::Affine { x, y } => {
            let den = x * y - rat(11, 1);
            if den.is_zero() {
                return Err(domain("xy = 11: k is undefined"));
            }
            Ok(x / den)
        }
    }
}

/// True when `k(P)` is an integer.
pub fn k_is_integral(p: &RationalPoint) -> Result<bool> {
    Ok(k_value(p)?.is_integer())
}

/// All rational points with `k(P) = k`.
///
/// For `k != 0` the points lie on `Y = 11/X + 1/k`, so their `x` are rational
/// roots of [`WeierstrassModel::t_level_polynomial`]. For `k = 0` the answer
/// is the pole set of `t`.
pub fn points_with_k(model: &WeierstrassModel, k: i64) -> Vec<RationalPoint> {
    if k == 0 {
        let mut pts: Vec<RationalPoint> = [0i64, -11]
            .iter()
            .map(|&y| RationalPoint::from_ints(0, y))
            .filter(|p| model.contains(p))
            .chain(std::iter::once(RationalPoint::Infinity))
            .collect();
        pts.sort();
        return pts;
    }
    let s = rat(1, k);
    let quintic = model.t_level_polynomial(&s);
    let mut pts: Vec<RationalPoint> = rational_roots(&quintic)
        .unwrap_or_default()
        .into_iter()
        .filter(|x| !x.is_zero())
        .map(|x| {
            let y = rat(11, 1) / &x + &s;
            RationalPoint::affine(x, y)
        })
        .filter(|p| model.contains(p))
        .collect();
    pts.sort();
    pts
}

/// `gcd(r s, d) = 1` for `x = r/d^2`, `y = s/d^3`; trivially true at infinity.
pub fn has_coprime_weighted_form(p: &RationalPoint) -> bool {
    match p.weighted_form() {
        None => p.is_infinity(),
        Some((r, s, d)) => (r * s).gcd(&d).is_one(),
    }
}

/// True when `2y + a1 x + a3 > 0`; `None` at infinity.
pub fn upper_branch(model: &WeierstrassModel, p: &RationalPoint) -> Option<bool> {
    let (x, y) = (p.x()?, p.y()?);
    let [a1, _, a3, _, _] = model.coefficients();
    let w = rat(2, 1) * y + BigRational::from_integer(a1.clone()) * x + BigRational::from_integer(a3.clone());
    Some(w.is_positive())
}
