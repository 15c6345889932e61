//! Run configuration and the JSON report.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::analytic::{certify_cusp_torsion, certify_interval_lemma, IntervalCertificate};
use crate::certificate::Certificate;
use crate::curve::WeierstrassModel;
use crate::error::{Error, Result};
use crate::exact::{rat, serde_rational};
use crate::heights::verify_height_comparison;
use crate::linear_forms::{
    height_spot_points, reduction_stability, scan_small_k, solve_integral_points, Constants, ReductionTable,
    SolvedPoint,
};
use crate::modular::certify_equivalence_theorem;
use crate::real::Precision;

/// Version of the report layout.
pub const SCHEMA_VERSION: u32 = 1;
/// Smallest allowed escalation factor.
pub const MIN_ESCALATION: (i64, i64) = (3, 2);

/// Everything a run depends on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub precision_digits: u32,
    /// Factor between the base precision and its re-run.
    #[serde(with = "serde_rational")]
    pub escalation_factor: BigRational,
    /// `|m|` range of the integrality equivalence check.
    pub equivalence_bound: i64,
    pub constants: Constants,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_digits: Precision::DEFAULT.digits(),
            escalation_factor: rat(2, 1),
            equivalence_bound: 12,
            constants: Constants::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        Precision::new(self.precision_digits)?;
        if self.escalation_factor < rat(MIN_ESCALATION.0, MIN_ESCALATION.1) {
            return Err(Error::Precondition("escalation factor must be at least 3/2".into()));
        }
        self.constants.david.validate()
    }

    pub fn precision(&self) -> Result<Precision> {
        Precision::new(self.precision_digits)
    }

    pub fn escalation(&self) -> f64 {
        self.escalation_factor.to_f64().unwrap_or(2.0)
    }
}

/// One certificate with its wall-clock time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub certificate: Certificate,
    /// Timing field; the only part of a report that varies between runs.
    pub elapsed_ms: u64,
}

/// The full report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: RunConfig,
    pub passed: bool,
    pub certificates: Vec<Entry>,
    pub points: Vec<SolvedPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<IntervalCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionTable>,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            passed: true,
            certificates: vec![],
            points: vec![],
            intervals: None,
            reduction: None,
        }
    }

    pub fn push(&mut self, certificate: Certificate, elapsed_ms: u64) {
        self.passed &= certificate.passed;
        self.certificates.push(Entry { certificate, elapsed_ms });
    }

    /// Runs `f`, turning an error into a failed certificate named `name`.
    pub fn run(&mut self, name: &str, f: impl FnOnce() -> Result<Certificate>) {
        let start = Instant::now();
        let c = f().unwrap_or_else(|e| {
            let mut c = Certificate::new(name);
            c.fail(e.to_string());
            c
        });
        self.push(c, start.elapsed().as_millis() as u64);
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// A copy with every timing field zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for e in &mut r.certificates {
            e.elapsed_ms = 0;
        }
        r
    }
}

/// The full pipeline plus the equivalence theorem.
pub fn full_report(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let prec = cfg.precision()?;
    let mut report = Report::new(cfg.clone());
    let solve = solve_integral_points(&cfg.constants, prec, cfg.escalation());
    for s in solve.stages {
        report.push(s.certificate, s.elapsed_ms);
    }
    report.points = solve.points;
    report.reduction = solve.reduction;
    report.run("integral j-invariants", || certify_equivalence_theorem(cfg.equivalence_bound));
    Ok(report)
}

/// The interval lemma alone, keeping the interval table.
pub fn interval_report(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new(cfg.clone());
    let start = Instant::now();
    let c = certify_interval_lemma(&cfg.constants.threshold, cfg.precision()?, cfg.escalation())?;
    report.push(c.certificate.clone(), start.elapsed().as_millis() as u64);
    report.intervals = Some(c);
    Ok(report)
}

/// The height comparison on the spot-check points.
pub fn height_report(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new(cfg.clone());
    let prec = cfg.precision()?;
    report.run("height comparison", || {
        verify_height_comparison(&WeierstrassModel::xns11(), &height_spot_points()?, prec)
    });
    Ok(report)
}

/// The cusp torsion certificate.
pub fn torsion_report(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new(cfg.clone());
    let prec = cfg.precision()?;
    report.run("cusp torsion", || certify_cusp_torsion(prec));
    Ok(report)
}

/// The reduction at every stability precision.
pub fn reduction_report(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new(cfg.clone());
    let start = Instant::now();
    let (mut tables, mut c) = reduction_stability(&cfg.constants, cfg.escalation())?;
    let main = tables
        .iter()
        .position(|t| t.digits == cfg.constants.reduction_digits)
        .unwrap_or(0);
    if !tables.is_empty() {
        let t = tables.swap_remove(main);
        c.absorb(&format!("{} digits", t.digits), &t.certificate);
        report.reduction = Some(t);
    }
    report.push(c, start.elapsed().as_millis() as u64);
    Ok(report)
}

/// The `k` scan as a certificate.
pub fn scan_report(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new(cfg.clone());
    let start = Instant::now();
    let scan = scan_small_k(cfg.constants.k_limit);
    let c = crate::linear_forms::scan_certificate(&scan, &cfg.constants);
    report.push(c, start.elapsed().as_millis() as u64);
    Ok(report)
}

/// The equivalence theorem alone.
pub fn equivalence_report(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new(cfg.clone());
    report.run("integral j-invariants", || certify_equivalence_theorem(cfg.equivalence_bound));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            escalation_factor: rat(5, 4),
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let low = RunConfig {
            precision_digits: 10,
            ..RunConfig::default()
        };
        assert!(low.validate().is_err());
    }

    #[test]
    fn scan_report_round_trips() {
        let r = scan_report(&RunConfig::default()).unwrap();
        assert!(r.passed);
        let js = r.to_json().unwrap();
        assert_eq!(Report::from_json(&js).unwrap(), r);
    }
}
