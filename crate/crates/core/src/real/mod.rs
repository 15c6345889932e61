//! Arbitrary-precision reals, real root isolation and continued fractions.

mod bigreal;
mod cf;
mod roots;

pub use bigreal::{BigReal, DecimalReal, Precision, GUARD_BITS};
pub use cf::{continued_fraction, continued_fraction_exact, CfExpansion, Convergent};
pub use roots::{count_real_roots, real_roots, sign_at, sturm_sequence, IsolatedRoot};

use crate::error::{Error, Result};

/// Digits of agreement demanded between a run and its escalated re-run,
/// below the base precision.
pub const ESCALATION_SLACK: u32 = 10;

/// A value computed at a base precision and re-verified at a higher one.
#[derive(Clone, Debug)]
pub struct Escalated<T> {
    pub value: T,
    pub reference: T,
    pub base: Precision,
    pub high: Precision,
}

/// Runs `f` at `prec` and at `prec` scaled by `factor`, and requires the two
/// real results to agree to `prec - ESCALATION_SLACK` digits.
pub fn escalate<F>(prec: Precision, factor: f64, f: F) -> Result<Escalated<BigReal>>
where
    F: Fn(Precision) -> Result<BigReal> + Sync,
{
    let high = prec.scaled(factor.max(1.0));
    let (a, b) = crate::par::join(|| f(prec), || f(high));
    let (value, reference) = (a?, b?);
    let need = prec.digits().saturating_sub(ESCALATION_SLACK);
    if !value.agrees_with(&reference, need) {
        return Err(Error::InsufficientPrecision(format!(
            "{value} and its re-run at {} digits disagree within {need} digits",
            high.digits()
        )));
    }
    Ok(Escalated {
        value,
        reference,
        base: prec,
        high,
    })
}

/// Runs `f` at `prec` and at `prec` scaled by `factor`; every real in the
/// returned lists must agree to `prec - ESCALATION_SLACK` digits. Returns the
/// base-precision payload and the higher precision used.
pub fn escalate_values<T, F>(prec: Precision, factor: f64, f: F) -> Result<(T, Precision)>
where
    T: Send,
    F: Fn(Precision) -> Result<(Vec<BigReal>, T)> + Sync,
{
    let high = prec.scaled(factor.max(1.0));
    let (a, b) = crate::par::join(|| f(prec), || f(high));
    let ((va, value), (vb, _)) = (a?, b?);
    let need = prec.digits().saturating_sub(ESCALATION_SLACK);
    if va.len() != vb.len() {
        return Err(Error::InsufficientPrecision(format!(
            "re-run at {} digits found {} values instead of {}",
            high.digits(),
            vb.len(),
            va.len()
        )));
    }
    if let Some((x, y)) = va.iter().zip(&vb).find(|(x, y)| !x.agrees_with(y, need)) {
        return Err(Error::InsufficientPrecision(format!(
            "{x} and its re-run {y} at {} digits disagree within {need} digits",
            high.digits()
        )));
    }
    Ok((value, high))
}
