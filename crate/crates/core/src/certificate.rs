//! Pass/fail records carrying every compared value.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::exact::{format_rational, parse_rational};
use crate::real::BigReal;

/// Digits after the decimal point used when rendering compared reals.
pub const RENDER_DIGITS: u32 = 12;

/// Fixed-point rendering, switching to scientific for values that fixed
/// point would show as zero or with too many integer digits.
pub fn render(v: &BigReal) -> String {
    let a = v.abs().to_f64();
    if !v.is_zero() && !(1e-6..1e15).contains(&a) {
        v.to_scientific(RENDER_DIGITS + 1)
    } else {
        v.to_decimal(RENDER_DIGITS)
    }
}

/// One comparison: what was computed, what it was compared with, and how.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub computed: String,
    pub expected: String,
    /// `"exact"`, `"abs<=tol"`, `"<"`, `"<="`, `">"`, `">="` or `"flag"`.
    pub relation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    /// Signed slack of the relation; positive when it holds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<String>,
    pub passed: bool,
}

impl Check {
    /// Exact textual equality.
    pub fn exact(label: impl Into<String>, computed: impl ToString, expected: impl ToString) -> Self {
        let (c, e) = (computed.to_string(), expected.to_string());
        Check {
            label: label.into(),
            passed: c == e,
            computed: c,
            expected: e,
            relation: "exact".into(),
            tolerance: None,
            margin: None,
        }
    }

    /// `|computed - expected| <= tol`, with `expected` and `tol` decimal literals.
    pub fn approx(label: impl Into<String>, computed: &BigReal, expected: &str, tol: &str) -> Self {
        let prec = computed.precision();
        let e = BigReal::parse(expected, prec).expect("valid literal");
        let t = BigReal::parse(tol, prec).expect("valid literal");
        let diff = (computed - &e).abs();
        let margin = &t - &diff;
        Check {
            label: label.into(),
            computed: render(computed),
            expected: expected.to_string(),
            relation: "abs<=tol".into(),
            tolerance: Some(tol.to_string()),
            margin: Some(margin.to_scientific(4)),
            passed: !margin.is_negative(),
        }
    }

    /// `lhs rel rhs` for reals, with `rel` one of `<`, `<=`, `>`, `>=`.
    pub fn compare(label: impl Into<String>, lhs: &BigReal, rel: &str, rhs: &BigReal) -> Self {
        let margin = match rel {
            "<" | "<=" => rhs - lhs,
            _ => lhs - rhs,
        };
        let passed = match rel {
            "<" | ">" => margin.is_positive(),
            _ => !margin.is_negative(),
        };
        Check {
            label: label.into(),
            computed: render(lhs),
            expected: render(rhs),
            relation: rel.to_string(),
            tolerance: None,
            margin: Some(margin.to_scientific(6)),
            passed,
        }
    }

    /// Same as [`Check::compare`] with pre-rendered values, for quantities
    /// such as `ln` of astronomically small numbers.
    pub fn compare_rendered(
        label: impl Into<String>,
        lhs: String,
        rel: &str,
        rhs: String,
        margin: String,
        passed: bool,
    ) -> Self {
        Check {
            label: label.into(),
            computed: lhs,
            expected: rhs,
            relation: rel.to_string(),
            tolerance: None,
            margin: Some(margin),
            passed,
        }
    }

    /// Comparison of exact rationals.
    pub fn compare_exact(label: impl Into<String>, lhs: &BigRational, rel: &str, rhs: &BigRational) -> Self {
        let passed = match rel {
            "<" => lhs < rhs,
            "<=" => lhs <= rhs,
            ">" => lhs > rhs,
            ">=" => lhs >= rhs,
            _ => lhs == rhs,
        };
        let margin = match rel {
            "<" | "<=" => rhs - lhs,
            _ => lhs - rhs,
        };
        Check {
            label: label.into(),
            computed: format_rational(lhs),
            expected: format_rational(rhs),
            relation: rel.to_string(),
            tolerance: None,
            margin: Some(format_rational(&margin)),
            passed,
        }
    }

    /// A boolean property with a description of what was observed.
    pub fn flag(label: impl Into<String>, ok: bool, observed: impl ToString) -> Self {
        Check {
            label: label.into(),
            computed: observed.to_string(),
            expected: "true".into(),
            relation: "flag".into(),
            tolerance: None,
            margin: None,
            passed: ok,
        }
    }

    /// The margin parsed back as a rational, when it is one.
    pub fn margin_value(&self) -> Option<BigRational> {
        self.margin.as_deref().and_then(|m| parse_rational(m).ok())
    }
}

/// The outcome of one certified statement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    pub checks: Vec<Check>,
    /// Named values recorded for the reader but not compared.
    #[serde(default)]
    pub values: BTreeMap<String, String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(name: impl Into<String>) -> Self {
        Certificate {
            name: name.into(),
            passed: true,
            precision: None,
            checks: vec![],
            values: BTreeMap::new(),
            notes: vec![],
        }
    }

    pub fn with_precision(mut self, digits: u32) -> Self {
        self.precision = Some(digits);
        self
    }

    pub fn push(&mut self, c: Check) -> &mut Self {
        self.passed &= c.passed;
        self.checks.push(c);
        self
    }

    pub fn record(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.values.insert(key.into(), value.to_string());
        self
    }

    pub fn note(&mut self, n: impl Into<String>) -> &mut Self {
        self.notes.push(n.into());
        self
    }

    /// Marks the certificate failed with a reason (used for stage errors).
    pub fn fail(&mut self, reason: impl Into<String>) -> &mut Self {
        let r = reason.into();
        self.push(Check::flag("stage completed", false, r));
        self
    }

    /// Absorbs another certificate's checks under a label prefix.
    pub fn absorb(&mut self, prefix: &str, other: &Certificate) -> &mut Self {
        for c in &other.checks {
            let mut c = c.clone();
            c.label = format!("{prefix}: {}", c.label);
            self.push(c);
        }
        for (k, v) in &other.values {
            self.values.insert(format!("{prefix}: {k}"), v.clone());
        }
        for n in &other.notes {
            self.notes.push(format!("{prefix}: {n}"));
        }
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}
