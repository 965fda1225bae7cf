//! JSON reports and the curve CSV.
//!
//! Complex numbers are always `[re, im]` pairs and matrices are lists of
//! rows. Field order is fixed, so identical inputs give byte-identical
//! output.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::analysis::{Analysis, PathTaken, PerturbationNorms};
use crate::corrector::LemmaDiagnostics;
use crate::error::Error;
use crate::matpoly::{MatrixPolynomial, WeightSet};
use crate::pencil::{CurveSample, Slope};
use crate::perturbation::{HypothesisReport, VerificationReport};
use crate::CMat;

/// Value of the `kind` field of an analysis report.
pub const REPORT_KIND: &str = "polydist-report";
/// Value of the `kind` field of a verification report.
pub const VERIFY_KIND: &str = "polydist-verify";

/// Exact header of the curve CSV.
pub const CURVE_HEADER: &str = "gamma,s_2n_minus_1,s_2n_minus_2";

pub(crate) fn complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn matrix_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    m.row_iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn matrix2_rows(m: &Matrix2<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..2)
        .map(|i| (0..2).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn coefficient_rows(cs: &[CMat]) -> Vec<Vec<Vec<[f64; 2]>>> {
    cs.iter().map(matrix_rows).collect()
}

struct Matrices<'a>(&'a [CMat]);

impl Serialize for Matrices<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for m in self.0 {
            seq.serialize_element(&matrix_rows(m))?;
        }
        seq.end()
    }
}

/// The problem as it was understood, echoed into the report so it can be
/// re-verified on its own.
#[derive(Debug, Clone, Serialize)]
pub struct ProblemEcho {
    pub n: usize,
    pub m: usize,
    pub coefficients: Vec<Vec<Vec<[f64; 2]>>>,
    pub weights: Vec<f64>,
    pub mu: [f64; 2],
}

impl ProblemEcho {
    pub fn new(p: &MatrixPolynomial, w: &WeightSet, mu: Complex64) -> Self {
        Self {
            n: p.dim(),
            m: p.degree(),
            coefficients: coefficient_rows(p.coeffs()),
            weights: w.weights().to_vec(),
            mu: [mu.re, mu.im],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorEntry {
    pub code: &'static str,
    pub message: String,
}

impl From<&Error> for ErrorEntry {
    fn from(e: &Error) -> Self {
        Self {
            code: e.code(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct NormalityEntry {
    weakly_normal: bool,
    worst_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
struct GammaEntry {
    gamma_star: f64,
    s_star: f64,
    s_2n_minus_2: f64,
    gap: f64,
    coalesced: bool,
    slope_a: Slope,
    slope_b: Slope,
    gamma_max: f64,
    f_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
struct CorrectionEntry {
    m: Vec<Vec<[f64; 2]>>,
    hermitian_residual: f64,
    lambda1: f64,
    lambda2: f64,
    xi: f64,
    eta: f64,
    alpha: [f64; 2],
    beta: [f64; 2],
    form_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
struct PerturbationEntry<'a> {
    phi: [f64; 2],
    delta: Vec<Vec<[f64; 2]>>,
    delta_rank_deficient: bool,
    delta_coefficients: Matrices<'a>,
    q_coefficients: Matrices<'a>,
    norms: &'a PerturbationNorms,
}

impl Clone for Matrices<'_> {
    fn clone(&self) -> Self {
        Matrices(self.0)
    }
}

impl std::fmt::Debug for Matrices<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport<'a> {
    kind: &'static str,
    status: &'static str,
    mode: String,
    problem: ProblemEcho,
    error: Option<ErrorEntry>,
    hypotheses: HypothesisReport,
    weak_normality: NormalityEntry,
    gamma_search: Option<GammaEntry>,
    path: Option<PathTaken>,
    pre_diagnostics: Option<LemmaDiagnostics>,
    correction: Option<CorrectionEntry>,
    post_diagnostics: Option<LemmaDiagnostics>,
    perturbation: Option<PerturbationEntry<'a>>,
    verification: Option<VerificationReport>,
    exit_code: i32,
}

/// Exit status for an analysis: 0 when the verdict is "multiple", 2
/// otherwise.
pub fn exit_code(a: &Analysis) -> i32 {
    if a.succeeded() {
        0
    } else {
        2
    }
}

impl<'a> AnalysisReport<'a> {
    pub fn new(p: &MatrixPolynomial, w: &WeightSet, a: &'a Analysis) -> Self {
        let status = if a.error.is_some() {
            "error"
        } else if a.succeeded() {
            "multiple"
        } else {
            "verification_failed"
        };
        let c = |z: Complex64| [z.re, z.im];
        Self {
            kind: REPORT_KIND,
            status,
            mode: a.mode.to_string(),
            problem: ProblemEcho::new(p, w, a.mu),
            error: a.error.as_ref().map(ErrorEntry::from),
            hypotheses: a.hypotheses,
            weak_normality: NormalityEntry {
                weakly_normal: a.normality.weakly_normal,
                worst_residual: a.normality.worst_residual,
            },
            gamma_search: a.record.as_ref().map(|r| GammaEntry {
                gamma_star: r.gamma_star,
                s_star: r.s_star,
                s_2n_minus_2: r.triplet_b.s,
                gap: r.gap,
                coalesced: r.coalesced,
                slope_a: r.slope_a,
                slope_b: r.slope_b,
                gamma_max: r.gamma_max,
                f_norm: r.f_norm,
            }),
            path: a.path,
            pre_diagnostics: a.pre_diagnostics,
            correction: a.correction.as_ref().map(|r| CorrectionEntry {
                m: matrix2_rows(&r.branch.m),
                hermitian_residual: r.branch.hermitian_residual,
                lambda1: r.solution.lambda1,
                lambda2: r.solution.lambda2,
                xi: r.solution.xi,
                eta: r.solution.eta,
                alpha: c(r.alpha),
                beta: c(r.beta),
                form_residual: r.form_residual,
            }),
            post_diagnostics: a.correction.as_ref().map(|r| r.diagnostics),
            perturbation: a.construction.as_ref().map(|k| PerturbationEntry {
                phi: c(k.phi),
                delta: matrix_rows(&k.delta.matrix),
                delta_rank_deficient: k.delta.rank_deficient,
                delta_coefficients: Matrices(&k.delta_coeffs),
                q_coefficients: Matrices(k.q.coeffs()),
                norms: &k.norms,
            }),
            verification: a.verification,
            exit_code: exit_code(a),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    kind: &'static str,
    mu: [f64; 2],
    verification: VerificationReport,
    exit_code: i32,
}

impl VerifyReport {
    pub fn new(mu: Complex64, verification: VerificationReport) -> Self {
        let exit_code = if verification.verdict.is_multiple() {
            0
        } else {
            2
        };
        Self {
            kind: VERIFY_KIND,
            mu: [mu.re, mu.im],
            verification,
            exit_code,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.exit_code
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

/// Decimal rendering with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", digits.saturating_sub(1), x);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Curve samples as CSV with [`CURVE_HEADER`] and 15 significant digits.
pub fn curve_csv(samples: &[CurveSample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&format_significant(s.gamma, 15));
        out.push(',');
        out.push_str(&format_significant(s.s_lo, 15));
        out.push(',');
        out.push_str(&format_significant(s.s_hi, 15));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(4.0, 15), "4.00000000000000");
        assert_eq!(format_significant(0.1, 15), "0.100000000000000");
        assert_eq!(format_significant(12.5, 15), "12.5000000000000");
        assert_eq!(format_significant(0.0, 15), "0.00000000000000");
        assert_eq!(format_significant(1.234e-5, 3), "0.0000123");
    }

    #[test]
    fn csv_header_and_rows() {
        let csv = curve_csv(&[
            CurveSample {
                gamma: 0.0,
                s_hi: 6.0,
                s_lo: 2.0,
            },
            CurveSample {
                gamma: 1.0,
                s_hi: 4.0,
                s_lo: 4.0,
            },
        ]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CURVE_HEADER);
        assert_eq!(
            lines[1],
            "0.00000000000000,2.00000000000000,6.00000000000000"
        );
        assert_eq!(lines.len(), 3);
    }
}
