//! Construction of `Q(λ) = P(λ) + Δ(λ)` from a singular pair at `γ*`, and
//! verification that `μ` is a multiple eigenvalue of the result.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::densela::{self, det_and_slope, pinv_thin};
use crate::error::{Error, Result};
use crate::matpoly::{unit_conj, MatrixPolynomial, WeightSet};
use crate::CMat;

/// Default tolerance of [`verify_multiple`].
pub const VERIFY_TOL: f64 = 1e-8;

/// Relative threshold below which `P'(μ)` or `P(μ)` is reported singular.
pub const HYPOTHESIS_TOL: f64 = 1e-10;

/// `Δ = −s* · U · [[1, −γ*φ], [0, 1]] · V⁺`.
#[derive(Debug, Clone)]
pub struct DeltaCore {
    pub matrix: CMat,
    /// `V` had numerical rank below 2 and its pseudoinverse was truncated.
    pub rank_deficient: bool,
}

pub fn build_delta(
    s_star: f64,
    u_mat: &CMat,
    v_mat: &CMat,
    gamma_star: f64,
    phi: Complex64,
) -> Result<DeltaCore> {
    if !(gamma_star > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma* must be positive, got {gamma_star}"
        )));
    }
    if u_mat.ncols() != 2 || v_mat.ncols() != 2 || u_mat.nrows() != v_mat.nrows() {
        return Err(Error::Dimension("U and V must both be n x 2".into()));
    }
    if v_mat.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::InvalidArgument("V is zero".into()));
    }
    let pinv = pinv_thin(v_mat)?;
    let one = Complex64::new(1.0, 0.0);
    let shear = Matrix2::new(one, -phi * gamma_star, Complex64::new(0.0, 0.0), one);
    let shear = CMat::from_iterator(2, 2, shear.iter().copied());
    let matrix = u_mat * shear * &pinv.matrix * Complex64::from(-s_star);
    Ok(DeltaCore {
        matrix,
        rank_deficient: pinv.truncated,
    })
}

/// `Δ_j = (ω_j / w(|μ|)) · (μ̄/|μ|)^j · Δ`, with `(μ̄/|μ|)^0 = 1` and all
/// higher powers zero at `μ = 0`.
pub fn delta_coefficients(delta: &CMat, w: &WeightSet, mu: Complex64) -> Vec<CMat> {
    let w_mu = w.value(mu.norm()).unwrap();
    let dir = unit_conj(mu);
    let mut power = Complex64::new(1.0, 0.0);
    w.weights()
        .iter()
        .map(|&omega| {
            let d = delta * (power * (omega / w_mu));
            power *= dir;
            d
        })
        .collect()
}

/// `Q(λ) = P(λ) + Σ Δ_j λ^j`.
pub fn build_q(p: &MatrixPolynomial, delta_coeffs: &[CMat]) -> Result<MatrixPolynomial> {
    if delta_coeffs.len() != p.coeffs().len() {
        return Err(Error::Dimension(format!(
            "{} perturbation coefficients for a degree-{} polynomial",
            delta_coeffs.len(),
            p.degree()
        )));
    }
    let coeffs = p
        .coeffs()
        .iter()
        .zip(delta_coeffs)
        .map(|(a, d)| {
            if a.shape() != d.shape() {
                Err(Error::Dimension(
                    "perturbation coefficient shape differs from P".into(),
                ))
            } else {
                Ok(a + d)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixPolynomial::new(coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `μ` is an eigenvalue with algebraic multiplicity ≥ 2 and a
    /// one-dimensional null space.
    MultipleDefective,
    /// `Q(μ)` has a null space of dimension ≥ 2.
    MultipleSemisimple,
    SimpleEigenvalue,
    NotAnEigenvalue,
}

impl Verdict {
    pub fn is_multiple(self) -> bool {
        matches!(
            self,
            Verdict::MultipleDefective | Verdict::MultipleSemisimple
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub tol: f64,
    /// `s_min(Q(μ)) / ‖Q(μ)‖₂`.
    pub eigen_residual: f64,
    #[serde(serialize_with = "crate::report::complex")]
    pub det: Complex64,
    #[serde(serialize_with = "crate::report::complex")]
    pub det_slope: Complex64,
    pub slope_scale: f64,
    /// `|d/dλ det Q(λ)|_μ| / slope_scale`.
    pub slope_residual: f64,
    /// Number of singular values of `Q(μ)` below `tol · ‖Q(μ)‖₂`.
    pub geometric_multiplicity: usize,
}

/// Check whether `μ` is a multiple eigenvalue of `Q`.
///
/// `reference` is the unperturbed polynomial; the determinant slope is
/// measured relative to `max(1, |d/dλ det P(λ)|_μ|)`. Without a reference the
/// scale is 1.
pub fn verify_multiple(
    q: &MatrixPolynomial,
    mu: Complex64,
    tol: f64,
    reference: Option<&MatrixPolynomial>,
) -> Result<VerificationReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let value = q.evaluate(mu);
    let s = densela::singular_values(&value)?;
    let norm = s[0];
    let smin = *s.last().unwrap();
    let eigen_residual = if norm > 0.0 { smin / norm } else { 0.0 };
    let geometric_multiplicity = s.iter().filter(|&&x| x <= tol * norm).count();

    let (det, det_slope) = det_and_slope(q, mu);
    let slope_scale = reference.map_or(1.0, |p| det_and_slope(p, mu).1.norm().max(1.0));
    let slope_residual = det_slope.norm() / slope_scale;

    let verdict = if eigen_residual > tol {
        Verdict::NotAnEigenvalue
    } else if geometric_multiplicity >= 2 {
        Verdict::MultipleSemisimple
    } else if slope_residual <= tol {
        Verdict::MultipleDefective
    } else {
        Verdict::SimpleEigenvalue
    };
    Ok(VerificationReport {
        verdict,
        tol,
        eigen_residual,
        det,
        det_slope,
        slope_scale,
        slope_residual,
        geometric_multiplicity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// `s_min(P'(μ)) / ‖P'(μ)‖₂` (zero when `P'(μ) = 0`).
    pub derivative_ratio: f64,
    /// `μ` is numerically an eigenvalue of `P'`: the construction's
    /// hypothesis fails.
    pub derivative_singular: bool,
    pub p_smin: f64,
    /// `s_min(P(μ)) / ‖P(μ)‖₂`.
    pub p_ratio: f64,
    /// `μ` is numerically an eigenvalue of `P` already.
    pub mu_is_eigenvalue: bool,
}

fn smin_ratio(a: &CMat) -> Result<(f64, f64)> {
    let s = densela::singular_values(a)?;
    let smin = *s.last().unwrap();
    Ok((smin, if s[0] > 0.0 { smin / s[0] } else { 0.0 }))
}

pub fn precheck_hypotheses(p: &MatrixPolynomial, mu: Complex64) -> Result<HypothesisReport> {
    let (_, derivative_ratio) = smin_ratio(&p.derivative_value(mu))?;
    let (p_smin, p_ratio) = smin_ratio(&p.evaluate(mu))?;
    Ok(HypothesisReport {
        derivative_ratio,
        derivative_singular: derivative_ratio < HYPOTHESIS_TOL,
        p_smin,
        p_ratio,
        mu_is_eigenvalue: p_ratio < HYPOTHESIS_TOL,
    })
}
