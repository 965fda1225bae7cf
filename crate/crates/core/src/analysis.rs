//! End-to-end pipeline: hypotheses, γ-search, optional correction,
//! perturbation and verification.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::corrector::{self, lemma_tolerance, CorrectionResult, LemmaDiagnostics};
use crate::densela;
use crate::error::{Error, Result};
use crate::matpoly::{self, MatrixPolynomial, NormalityReport, WeightSet, NORMALITY_TOL};
use crate::pencil::{self, GammaOptions, GammaStarRecord};
use crate::perturbation::{
    self, DeltaCore, HypothesisReport, Verdict, VerificationReport, VERIFY_TOL,
};
use crate::CMat;

/// Which singular pair feeds the perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Correct when the branches coalesce or the single pair violates the
    /// zero-slope / equal-Gram conditions.
    #[default]
    Auto,
    SinglePair,
    Corrected,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Mode::Auto),
            "single" | "force-single-pair" => Ok(Mode::SinglePair),
            "corrected" | "force-corrected" => Ok(Mode::Corrected),
            _ => Err(format!(
                "unknown mode `{s}` (expected auto, single or corrected)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Auto => "auto",
            Mode::SinglePair => "force-single-pair",
            Mode::Corrected => "force-corrected",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathTaken {
    SinglePair,
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub mode: Mode,
    pub gamma: GammaOptions,
    pub verify_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Auto,
            gamma: GammaOptions::default(),
            verify_tol: VERIFY_TOL,
        }
    }
}

/// Norms exposed by the distance-bound report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationNorms {
    pub s_star: f64,
    pub delta_norm: f64,
    /// `‖Δ_j‖₂`.
    pub coefficient_norms: Vec<f64>,
    /// `‖Δ_j‖₂ / ω_j`, absent for zero weights.
    pub weighted_norms: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub phi: Complex64,
    pub delta: DeltaCore,
    pub delta_coeffs: Vec<CMat>,
    pub q: MatrixPolynomial,
    pub norms: PerturbationNorms,
}

/// Everything the pipeline produced, stage by stage. A stage that was not
/// reached is `None`; `error` holds the reason the pipeline stopped early.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub mu: Complex64,
    pub mode: Mode,
    pub hypotheses: HypothesisReport,
    pub normality: NormalityReport,
    pub record: Option<GammaStarRecord>,
    pub pre_diagnostics: Option<LemmaDiagnostics>,
    pub path: Option<PathTaken>,
    pub correction: Option<CorrectionResult>,
    pub construction: Option<Construction>,
    pub verification: Option<VerificationReport>,
    pub error: Option<Error>,
}

impl Analysis {
    pub fn verdict(&self) -> Option<Verdict> {
        self.verification.map(|v| v.verdict)
    }

    pub fn succeeded(&self) -> bool {
        self.verdict().is_some_and(Verdict::is_multiple)
    }

    pub fn q(&self) -> Option<&MatrixPolynomial> {
        self.construction.as_ref().map(|c| &c.q)
    }
}

fn norms(delta: &CMat, coeffs: &[CMat], w: &WeightSet, s_star: f64) -> PerturbationNorms {
    let coefficient_norms: Vec<f64> = coeffs.iter().map(densela::spectral_norm).collect();
    let weighted_norms = coefficient_norms
        .iter()
        .zip(w.weights())
        .map(|(&n, &omega)| (omega > 0.0).then(|| n / omega))
        .collect();
    PerturbationNorms {
        s_star,
        delta_norm: densela::spectral_norm(delta),
        coefficient_norms,
        weighted_norms,
    }
}

/// Run the whole construction for `P`, weights `w` and target `μ`.
///
/// Only invalid arguments are returned as `Err`. Numerical failures along
/// the way are recorded in [`Analysis::error`] together with the stages that
/// did complete.
pub fn analyze(
    p: &MatrixPolynomial,
    w: &WeightSet,
    mu: Complex64,
    opts: &AnalysisOptions,
) -> Result<Analysis> {
    w.check_compatible(p)?;
    if !(mu.re.is_finite() && mu.im.is_finite()) {
        return Err(Error::InvalidArgument("mu must be finite".into()));
    }
    if p.degree() == 0 {
        return Err(Error::InvalidArgument(
            "the construction needs degree >= 1".into(),
        ));
    }
    if !(opts.verify_tol > 0.0) {
        return Err(Error::InvalidArgument(
            "verification tolerance must be positive".into(),
        ));
    }

    let mut out = Analysis {
        mu,
        mode: opts.mode,
        hypotheses: perturbation::precheck_hypotheses(p, mu)?,
        normality: matpoly::is_weakly_normal(p, NORMALITY_TOL),
        record: None,
        pre_diagnostics: None,
        path: None,
        correction: None,
        construction: None,
        verification: None,
        error: None,
    };
    if let Err(e) = run(p, w, mu, opts, &mut out) {
        out.error = Some(e);
    }
    Ok(out)
}

fn run(
    p: &MatrixPolynomial,
    w: &WeightSet,
    mu: Complex64,
    opts: &AnalysisOptions,
    out: &mut Analysis,
) -> Result<()> {
    let record = pencil::maximize_gamma(p, mu, &opts.gamma)?;
    let pre = corrector::diagnose(&record.triplet_a, p, mu);
    let dp_norm = densela::spectral_norm(&p.derivative_value(mu));
    out.pre_diagnostics = Some(pre);

    let path = match opts.mode {
        Mode::SinglePair => PathTaken::SinglePair,
        Mode::Corrected => PathTaken::Corrected,
        Mode::Auto if record.coalesced || pre.violated(lemma_tolerance(dp_norm)) => {
            PathTaken::Corrected
        }
        Mode::Auto => PathTaken::SinglePair,
    };
    out.path = Some(path);

    let (u_mat, v_mat) = match path {
        PathTaken::SinglePair => (record.triplet_a.u_mat(), record.triplet_a.v_mat()),
        PathTaken::Corrected => {
            let corr = corrector::correct(&record, p, mu, opts.gamma.coalescence_tol);
            out.record = Some(record.clone());
            let corr = corr?;
            let mats = (corr.u_mat.clone(), corr.v_mat.clone());
            out.correction = Some(corr);
            mats
        }
    };
    out.record = Some(record.clone());

    let phi = matpoly::phi(w, mu);
    let delta = perturbation::build_delta(record.s_star, &u_mat, &v_mat, record.gamma_star, phi)?;
    let delta_coeffs = perturbation::delta_coefficients(&delta.matrix, w, mu);
    let q = perturbation::build_q(p, &delta_coeffs)?;
    let norms = norms(&delta.matrix, &delta_coeffs, w, record.s_star);
    out.verification = Some(perturbation::verify_multiple(
        &q,
        mu,
        opts.verify_tol,
        Some(p),
    )?);
    out.construction = Some(Construction {
        phi,
        delta,
        delta_coeffs,
        q,
        norms,
    });
    Ok(())
}
