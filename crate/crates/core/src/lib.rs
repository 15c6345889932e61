//! Certified computation of the integral points of the elliptic curve
//! `Y^2 + 11Y = X^3 + 11X^2 + 33X`, the points with `x/(xy - 11)` integral.

pub mod analytic;
pub mod certificate;
pub mod curve;
pub mod error;
pub mod exact;
pub mod heights;
pub mod linear_forms;
pub mod modular;
pub mod par;
pub mod periods;
pub mod real;
pub mod report;

pub use error::{Error, Result};
