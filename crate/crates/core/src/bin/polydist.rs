// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use polydist::analysis::{analyze, AnalysisOptions, Mode};
use polydist::pencil::sample_curve;
use polydist::perturbation::verify_multiple;
use polydist::problem::{parse_complex, parse_complex_str, parse_problem_value, ProblemSpec};
use polydist::report::{
    curve_csv, exit_code, AnalysisReport, ErrorEntry, VerifyReport, REPORT_KIND,
};
use polydist::{Error, MatrixPolynomial};

/// Distance to matrix polynomials with a prescribed multiple eigenvalue.
#[derive(Debug, Parser)]
#[command(name = "polydist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full construction and write a JSON report.
    Analyze {
        file: PathBuf,
        /// auto, single or corrected (overrides the file's `mode`).
        #[arg(long)]
        mode: Option<Mode>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Target eigenvalue as `re,im` (overrides the file's `mu`).
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        gamma_max: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        gamma_tol: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        coalescence_tol: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        verify_tol: Option<f64>,
    },
    /// Sample s_2n-1 and s_2n-2 over a range of gamma and write CSV.
    Curve {
        file: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        gamma_lo: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        gamma_hi: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
    },
    /// Check whether mu is a multiple eigenvalue of the polynomial in a
    /// problem file, or of Q in an analysis report.
    Verify {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn fail(e: &Error) -> ExitCode {
    let entry = ErrorEntry::from(e);
    eprintln!("error [{}]: {}", entry.code, entry.message);
    ExitCode::from(1)
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input {
        field: "<file>".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Input {
        field: "<root>".into(),
        message: format!("invalid JSON: {e}"),
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Input {
            field: "<output>".into(),
            message: format!("cannot write {}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn resolve_mu(spec: &ProblemSpec, flag: Option<&str>) -> Result<num_complex::Complex64, Error> {
    match flag {
        Some(s) => parse_complex_str(s),
        None => spec.require_mu(),
    }
}

fn check_positive(name: &str, value: Option<f64>) -> Result<(), Error> {
    match value {
        Some(v) if !(v > 0.0) => Err(Error::Input {
            field: name.into(),
            message: "must be positive".into(),
        }),
        _ => Ok(()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    file: &Path,
    mode: Option<Mode>,
    report: Option<&Path>,
    mu: Option<&str>,
    gamma_max: Option<f64>,
    grid: Option<usize>,
    gamma_tol: Option<f64>,
    coalescence_tol: Option<f64>,
    verify_tol: Option<f64>,
) -> Result<i32, Error> {
    let spec = parse_problem_value(&read_json(file)?)?;
    let mu = resolve_mu(&spec, mu)?;
    for (name, v) in [
        ("gamma-max", gamma_max),
        ("gamma-tol", gamma_tol),
        ("coalescence-tol", coalescence_tol),
        ("verify-tol", verify_tol),
    ] {
        check_positive(name, v)?;
    }
    if grid.is_some_and(|g| g < 2) {
        return Err(Error::Input {
            field: "grid".into(),
            message: "must be at least 2".into(),
        });
    }

    let mut opts = AnalysisOptions {
        mode: mode.unwrap_or(spec.mode),
        gamma: spec.gamma,
        verify_tol: verify_tol.unwrap_or(spec.verify_tol),
    };
    opts.gamma.gamma_max = gamma_max.unwrap_or(opts.gamma.gamma_max);
    opts.gamma.grid = grid.unwrap_or(opts.gamma.grid);
    opts.gamma.gamma_tol = gamma_tol.unwrap_or(opts.gamma.gamma_tol);
    opts.gamma.coalescence_tol = coalescence_tol.unwrap_or(opts.gamma.coalescence_tol);

    let analysis = analyze(&spec.polynomial, &spec.weights, mu, &opts)?;
    let rendered = AnalysisReport::new(&spec.polynomial, &spec.weights, &analysis).to_json();
    write_output(report, &rendered)?;
    if let Some(e) = &analysis.error {
        eprintln!("pipeline stopped [{}]: {e}", e.code());
    }
    Ok(exit_code(&analysis))
}

fn cmd_curve(
    file: &Path,
    gamma_lo: f64,
    gamma_hi: f64,
    samples: usize,
    out: &Path,
    mu: Option<&str>,
) -> Result<i32, Error> {
    let spec = parse_problem_value(&read_json(file)?)?;
    let mu = resolve_mu(&spec, mu)?;
    let curve = sample_curve(&spec.polynomial, mu, gamma_lo, gamma_hi, samples)?;
    write_output(Some(out), &curve_csv(&curve))?;
    Ok(0)
}

/// Q, its reference polynomial and μ from either a problem file or an
/// analysis report.
fn verify_inputs(
    root: &Value,
) -> Result<
    (
        MatrixPolynomial,
        Option<MatrixPolynomial>,
        Option<num_complex::Complex64>,
        f64,
    ),
    Error,
> {
    if root.get("kind").and_then(Value::as_str) == Some(REPORT_KIND) {
        let problem = &root["problem"];
        let q = root
            .get("perturbation")
            .and_then(|p| p.get("q_coefficients"))
            .ok_or_else(|| Error::Input {
                field: "perturbation.q_coefficients".into(),
                message: "report has no perturbed polynomial".into(),
            })?;
        let mut q_problem = problem.clone();
        q_problem["coefficients"] = q.clone();
        q_problem["reference_coefficients"] = problem["coefficients"].clone();
        q_problem["weights"] = Value::Null;
        let spec = parse_problem_value(&q_problem)?;
        let mu = parse_complex(&problem["mu"], "problem.mu")?;
        let tol = root["verification"]["tol"]
            .as_f64()
            .unwrap_or(spec.verify_tol);
        Ok((spec.polynomial, spec.reference, Some(mu), tol))
    } else {
        let spec = parse_problem_value(root)?;
        Ok((spec.polynomial, spec.reference, spec.mu, spec.verify_tol))
    }
}

fn cmd_verify(
    file: &Path,
    mu: Option<&str>,
    tol: Option<f64>,
    report: Option<&Path>,
) -> Result<i32, Error> {
    check_positive("tol", tol)?;
    let (q, reference, file_mu, file_tol) = verify_inputs(&read_json(file)?)?;
    let mu = match mu {
        Some(s) => parse_complex_str(s)?,
        None => file_mu.ok_or_else(|| Error::Input {
            field: "mu".into(),
            message: "give --mu or a `mu` field".into(),
        })?,
    };
    let verification = verify_multiple(&q, mu, tol.unwrap_or(file_tol), reference.as_ref())?;
    let rendered = VerifyReport::new(mu, verification);
    write_output(report, &rendered.to_json())?;
    Ok(rendered.exit_code())
}

fn main() -> ExitCode {
    // Usage errors are input errors (exit 1); exit 2 is reserved for a
    // failed verification.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Analyze {
            file,
            mode,
            report,
            mu,
            gamma_max,
            grid,
            gamma_tol,
            coalescence_tol,
            verify_tol,
        } => cmd_analyze(
            file,
            *mode,
            report.as_deref(),
            mu.as_deref(),
            *gamma_max,
            *grid,
            *gamma_tol,
            *coalescence_tol,
            *verify_tol,
        ),
        Command::Curve {
            file,
            gamma_lo,
            gamma_hi,
            samples,
            out,
            mu,
        } => cmd_curve(file, *gamma_lo, *gamma_hi, *samples, out, mu.as_deref()),
        Command::Verify {
            file,
            mu,
            tol,
            report,
        } => cmd_verify(file, mu.as_deref(), *tol, report.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => fail(&e),
    }
}
