use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::json;

use xns11_core::certificate::Certificate;
use xns11_core::curve::RationalPoint;
use xns11_core::exact::parse_rational;
use xns11_core::modular::{describe_j, j_map};
use xns11_core::report::{self, Report, RunConfig};
use xns11_core::Error;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Certificates for the integral points of Y^2 + 11Y = X^3 + 11X^2 + 33X.
#[derive(Parser, Debug)]
#[command(name = "xns11", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Working precision in decimal digits (at least 20).
    #[arg(long, global = true, env = "XNS11_PRECISION", default_value_t = 60, value_parser = parse_precision)]
    precision: u32,
    /// Factor between the base precision and its verification re-run (at least 3/2).
    #[arg(long, global = true, default_value = "2", value_parser = parse_escalation)]
    escalation: BigRational,
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// List every check, not only the failing ones.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full pipeline: prints the seven points.
    Solve,
    /// |g| >= 1 near the cusps.
    Lemma21 {
        /// |t| threshold of the neighbourhood of the cusps.
        #[arg(long, default_value = "1/20", value_parser = parse_rational_arg)]
        threshold: BigRational,
    },
    /// Height comparison h_hat <= h_t/3 + 4.52 on sample points.
    Lemma22,
    /// The cusps are 11-torsion.
    Lemma31,
    /// Points with x/(xy - 11) = k for |k| <= limit.
    ScanK {
        #[arg(long, default_value_t = 20)]
        limit: i64,
    },
    /// Continued fraction reduction of the bound on m.
    Reduce,
    /// j-invariant of a point: `jmap <x> <y>` or `jmap --infinity`.
    Jmap {
        #[arg(allow_hyphen_values = true, value_parser = parse_rational_arg, required_unless_present = "infinity")]
        x: Option<BigRational>,
        #[arg(allow_hyphen_values = true, value_parser = parse_rational_arg, required_unless_present = "infinity")]
        y: Option<BigRational>,
        #[arg(long, conflicts_with_all = ["x", "y"])]
        infinity: bool,
    },
    /// j(P) is integral exactly when x/(xy - 11) is.
    Thm41 {
        /// |m| range of the multiples m P0 checked.
        #[arg(long, default_value_t = 12)]
        bound: i64,
    },
    /// Full pipeline written as JSON to a file.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_rational_arg(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_precision(s: &str) -> Result<u32, String> {
    let d: u32 = s.trim().parse().map_err(|_| format!("not a digit count: {s:?}"))?;
    if d < 20 {
        return Err(format!("precision must be at least 20 digits, got {d}"));
    }
    Ok(d)
}

fn parse_escalation(s: &str) -> Result<BigRational, String> {
    let q = parse_rational_arg(s)?;
    if q < BigRational::new(3.into(), 2.into()) {
        return Err(format!("escalation must be at least 3/2, got {s}"));
    }
    Ok(q)
}

fn print_certificate(c: &Certificate, elapsed_ms: u64, verbose: bool) {
    let tag = if c.passed { "PASS" } else { "FAIL" };
    println!("{tag} {} ({} checks, {elapsed_ms} ms)", c.name, c.checks.len());
    for check in c.checks.iter().filter(|k| verbose || !k.passed) {
        let mark = if check.passed { "ok " } else { "BAD" };
        let tol = check.tolerance.as_deref().map(|t| format!(" tol {t}")).unwrap_or_default();
        println!(
            "  {mark} {}: {} {} {}{tol}",
            check.label, check.computed, check.relation, check.expected
        );
    }
    if verbose {
        for (k, v) in &c.values {
            println!("  {k} = {v}");
        }
        for n in &c.notes {
            println!("  note: {n}");
        }
    }
}

fn emit(report: &Report, g: &Global) -> Result<(), Error> {
    if g.json {
        println!("{}", report.to_json()?);
        return Ok(());
    }
    for e in &report.certificates {
        print_certificate(&e.certificate, e.elapsed_ms, g.verbose);
    }
    if !report.points.is_empty() {
        println!("points with x/(xy - 11) integral: {}", report.points.len());
        for p in &report.points {
            println!("  m = {:>2}  {}  k = {}", p.m, p.point, p.k);
        }
    }
    if let Some(t) = &report.reduction {
        let cutoff = t.cutoff_index.map(|i| i.to_string()).unwrap_or_else(|| "none".into());
        println!("first convergent index with q >= V1: {cutoff}");
        if g.verbose {
            for r in &t.rows {
                println!("  {:>2} a = {} q = {} ln lhs = {}", r.index, r.a, r.q, r.lhs_ln.as_deref().unwrap_or("-"));
            }
        }
    }
    if let Some(iv) = &report.intervals {
        if let Some(m) = &iv.min_boundary_abs_g {
            println!("min |g| at interval ends: {m}");
        }
    }
    Ok(())
}

fn run_jmap(x: Option<BigRational>, y: Option<BigRational>, infinity: bool, g: &Global) -> ExitCode {
    let p = match (infinity, x, y) {
        (true, _, _) => RationalPoint::Infinity,
        (false, Some(x), Some(y)) => RationalPoint::affine(x, y),
        _ => {
            eprintln!("error: jmap needs <x> <y> or --infinity");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match j_map(&p) {
        Ok(j) => {
            let (value, disc) = describe_j(&j);
            if g.json {
                let v = json!({ "point": p, "j": value, "cm_discriminant": disc });
                println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            } else {
                match disc {
                    Some(d) => println!("{value}  (CM discriminant {d})"),
                    None => println!("{value}"),
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let mut cfg = RunConfig {
        precision_digits: g.precision,
        escalation_factor: g.escalation.clone(),
        ..RunConfig::default()
    };
    let built = match cli.command {
        Command::Jmap { x, y, infinity } => return run_jmap(x, y, infinity, g),
        Command::Solve => report::full_report(&cfg),
        Command::Lemma21 { threshold } => {
            cfg.constants.threshold = threshold;
            report::interval_report(&cfg)
        }
        Command::Lemma22 => report::height_report(&cfg),
        Command::Lemma31 => report::torsion_report(&cfg),
        Command::ScanK { limit } => {
            cfg.constants.k_limit = limit;
            report::scan_report(&cfg)
        }
        Command::Reduce => report::reduction_report(&cfg),
        Command::Thm41 { bound } => {
            cfg.equivalence_bound = bound;
            report::equivalence_report(&cfg)
        }
        Command::Report { out } => match report::full_report(&cfg) {
            Ok(r) => {
                let written = r
                    .to_json()
                    .and_then(|s| std::fs::write(&out, s + "\n").map_err(|e| Error::Parse(e.to_string())));
                if let Err(e) = written {
                    eprintln!("error: cannot write {}: {e}", out.display());
                    return ExitCode::from(EXIT_USAGE);
                }
                println!("{} report written to {}", if r.passed { "PASS" } else { "FAIL" }, out.display());
                return if r.passed { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED) };
            }
            Err(e) => Err(e),
        },
    };
    match built {
        Ok(r) => {
            if let Err(e) = emit(&r, g) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_FAILED);
            }
            if r.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Err(e @ (Error::Parse(_) | Error::Precondition(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}
