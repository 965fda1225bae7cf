//! Repair of the singular pair at a coalesced maximum.
//!
//! When `s_{2n-1}` and `s_{2n-2}` meet at `γ*` (the generic situation for
//! normal polynomials), neither computed singular pair satisfies
//! `u₂* P'(μ) v₁ = 0`. Any unit combination `α·(u⁽ᵃ⁾, v⁽ᵃ⁾) + β·(u⁽ᵇ⁾, v⁽ᵇ⁾)`
//! is still a singular pair of `F` for the shared value, and its slope is the
//! Hermitian form `[ᾱ β̄] M [α; β]` with
//! `M_ij = u₂⁽ⁱ⁾* P'(μ) v₁⁽ʲ⁾`. An indefinite `M` has a nonzero null
//! vector, which gives the repaired pair.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::densela::{self, herm_eig_2x2};
use crate::error::{Error, Result};
use crate::matpoly::MatrixPolynomial;
use crate::pencil::{GammaStarRecord, SingularTriplet};
use crate::{CMat, CVec};

/// Largest relative anti-Hermitian part tolerated in `M`.
pub const BRANCH_HERMITIAN_TOL: f64 = 1e-6;

/// `λ₁λ₂` above this multiple of `‖M‖₂²` means the form is definite.
pub const DEFINITE_TOL: f64 = 1e-10;

/// Largest post-correction slope, relative to `‖P'(μ)‖₂`.
pub const CORRECTED_SLOPE_TOL: f64 = 1e-8;

/// How far a singular pair is from the two conditions the perturbation
/// construction relies on: zero slope and `U*U = V*V`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LemmaDiagnostics {
    /// `Re(u₂* P'(μ) v₁)`.
    pub slope: f64,
    pub imag_residue: f64,
    /// `‖U*U − V*V‖₂` with `U = [u₁ u₂]`, `V = [v₁ v₂]`.
    pub uv_gram_gap: f64,
}

impl LemmaDiagnostics {
    pub fn violated(&self, tol: f64) -> bool {
        self.slope.abs() > tol || self.uv_gram_gap > tol
    }
}

/// Tolerance for [`LemmaDiagnostics::violated`] given `‖P'(μ)‖₂`.
pub fn lemma_tolerance(dp_norm: f64) -> f64 {
    1e-6 * dp_norm.max(1.0)
}

fn halves(x: &CVec) -> (CVec, CVec) {
    let n = x.len() / 2;
    (x.rows(0, n).into_owned(), x.rows(n, n).into_owned())
}

/// `‖U*U − V*V‖₂` for two `n × 2` matrices.
pub fn gram_gap(u_mat: &CMat, v_mat: &CMat) -> f64 {
    densela::spectral_norm(&(u_mat.adjoint() * u_mat - v_mat.adjoint() * v_mat))
}

fn diagnostics_of(dp: &CMat, u: &CVec, v: &CVec) -> LemmaDiagnostics {
    let (u1, u2) = halves(u);
    let (v1, v2) = halves(v);
    let z = (u2.adjoint() * dp * &v1)[(0, 0)];
    let u_mat = CMat::from_columns(&[u1, u2]);
    let v_mat = CMat::from_columns(&[v1, v2]);
    LemmaDiagnostics {
        slope: z.re,
        imag_residue: z.im.abs(),
        uv_gram_gap: gram_gap(&u_mat, &v_mat),
    }
}

pub fn diagnose(t: &SingularTriplet, p: &MatrixPolynomial, mu: Complex64) -> LemmaDiagnostics {
    diagnostics_of(&p.derivative_value(mu), &t.u, &t.v)
}

/// The Hermitized 2×2 slope matrix of a branch pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchMatrix {
    pub m: Matrix2<Complex64>,
    /// `‖M − M*‖₂ / ‖M‖₂` before Hermitization.
    pub hermitian_residual: f64,
}

fn to_dense(m: &Matrix2<Complex64>) -> CMat {
    CMat::from_iterator(2, 2, m.iter().copied())
}

fn build_m_with(dp: &CMat, a: &SingularTriplet, b: &SingularTriplet) -> Result<BranchMatrix> {
    let entry = |x: &SingularTriplet, y: &SingularTriplet| (x.u2().adjoint() * dp * y.v1())[(0, 0)];
    let raw = Matrix2::new(entry(a, a), entry(a, b), entry(b, a), entry(b, b));
    let norm = densela::spectral_norm(&to_dense(&raw));
    let skew = densela::spectral_norm(&to_dense(&(raw - raw.adjoint())));
    let hermitian_residual = if norm > 0.0 { skew / norm } else { 0.0 };
    if hermitian_residual > BRANCH_HERMITIAN_TOL {
        return Err(Error::BranchPairing {
            residual: hermitian_residual,
        });
    }
    Ok(BranchMatrix {
        m: (raw + raw.adjoint()) * Complex64::from(0.5),
        hermitian_residual,
    })
}

/// `M_ij = u₂⁽ⁱ⁾* P'(μ) v₁⁽ʲ⁾` over the branches `a`, `b`, Hermitized.
pub fn build_m(
    a: &SingularTriplet,
    b: &SingularTriplet,
    p: &MatrixPolynomial,
    mu: Complex64,
) -> Result<BranchMatrix> {
    build_m_with(&p.derivative_value(mu), a, b)
}

/// Null vector of the Hermitian form `[ᾱ β̄] M [α; β]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullFormSolution {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Eigenvectors of `M` (columns, for `λ₁` then `λ₂`).
    pub eigvecs: Matrix2<Complex64>,
    pub xi: f64,
    pub eta: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    /// `M` vanished; `(α, β) = (1, 0)` was returned.
    pub degenerate: bool,
}

/// `|[ᾱ β̄] M [α; β]|`.
pub fn form_residual(m: &Matrix2<Complex64>, alpha: Complex64, beta: Complex64) -> f64 {
    let x = Vector2::new(alpha, beta);
    (x.adjoint() * m * x)[(0, 0)].norm()
}

/// Solve `[ᾱ β̄] M [α; β] = 0` with `|α|² + |β|² = 1`.
///
/// With `M = W diag(λ₁, λ₂) W*` and `[α; β] = W [ξ; η]` the form becomes
/// `ξ²λ₁ + η²λ₂`, which vanishes for `ξ² = |λ₂|/(|λ₁|+|λ₂|)`,
/// `η² = |λ₁|/(|λ₁|+|λ₂|)` when `λ₁ ≥ 0 ≥ λ₂`. `ξ` and `η` are taken real
/// and nonnegative.
pub fn solve_null_form(m: &Matrix2<Complex64>) -> Result<NullFormSolution> {
    let eig = herm_eig_2x2(m)?;
    let [l1, l2] = eig.values;
    let scale = l1.abs().max(l2.abs());
    let w = eig.vectors;

    let (xi, eta, degenerate) = if scale == 0.0 {
        (1.0, 0.0, true)
    } else if l1 * l2 > DEFINITE_TOL * scale * scale {
        return Err(Error::DefiniteForm { product: l1 * l2 });
    } else if l1 * l2 > 0.0 {
        // Semidefinite up to roundoff: the smaller eigenvalue's vector.
        if l1.abs() <= l2.abs() {
            (1.0, 0.0, false)
        } else {
            (0.0, 1.0, false)
        }
    } else {
        let total = l1.abs() + l2.abs();
        ((l2.abs() / total).sqrt(), (l1.abs() / total).sqrt(), false)
    };

    let (alpha, beta) = if degenerate {
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        let x = w * Vector2::new(Complex64::from(xi), Complex64::from(eta));
        (x[0], x[1])
    };
    Ok(NullFormSolution {
        lambda1: l1,
        lambda2: l2,
        eigvecs: w,
        xi,
        eta,
        alpha,
        beta,
        degenerate,
    })
}

/// The repaired singular pair and everything needed to report on it.
#[derive(Debug, Clone)]
pub struct CorrectionResult {
    pub branch: BranchMatrix,
    pub solution: NullFormSolution,
    /// Coefficients of the combination over the original branch pair.
    pub alpha: Complex64,
    pub beta: Complex64,
    pub u: CVec,
    pub v: CVec,
    pub u_mat: CMat,
    pub v_mat: CMat,
    pub form_residual: f64,
    /// Diagnostics of the combined pair.
    pub diagnostics: LemmaDiagnostics,
}

fn combine_with(
    dp: &CMat,
    sol: &NullFormSolution,
    a: &SingularTriplet,
    b: &SingularTriplet,
    m: BranchMatrix,
) -> Result<CorrectionResult> {
    // Eigen-branches of M, each phase-normalized on its right vector so the
    // result does not depend on the basis the SVD picked inside the
    // coalesced subspace.
    let (alpha, beta) = if sol.degenerate {
        (sol.alpha, sol.beta)
    } else {
        let mut alpha = Complex64::new(0.0, 0.0);
        let mut beta = Complex64::new(0.0, 0.0);
        for (k, weight) in [sol.xi, sol.eta].into_iter().enumerate() {
            let w = sol.eigvecs.column(k);
            let v_k = &a.v * w[0] + &b.v * w[1];
            let c = densela::phase_factor(v_k.iter());
            alpha += w[0] * c * weight;
            beta += w[1] * c * weight;
        }
        (alpha, beta)
    };

    let u = &a.u * alpha + &b.u * beta;
    let v = &a.v * alpha + &b.v * beta;
    let diagnostics = diagnostics_of(dp, &u, &v);
    let dp_norm = densela::spectral_norm(dp);
    if diagnostics.slope.abs() > CORRECTED_SLOPE_TOL * dp_norm {
        return Err(Error::CorrectionFailed {
            slope: diagnostics.slope,
        });
    }
    let (u1, u2) = halves(&u);
    let (v1, v2) = halves(&v);
    Ok(CorrectionResult {
        form_residual: form_residual(&m.m, alpha, beta),
        branch: m,
        solution: *sol,
        alpha,
        beta,
        u_mat: CMat::from_columns(&[u1, u2]),
        v_mat: CMat::from_columns(&[v1, v2]),
        u,
        v,
        diagnostics,
    })
}

/// Combine the branch pair with the null-form coefficients.
pub fn combine(
    sol: &NullFormSolution,
    a: &SingularTriplet,
    b: &SingularTriplet,
    p: &MatrixPolynomial,
    mu: Complex64,
) -> Result<CorrectionResult> {
    let dp = p.derivative_value(mu);
    let m = build_m_with(&dp, a, b)?;
    combine_with(&dp, sol, a, b, m)
}

/// Full correction for a coalesced maximum.
pub fn correct(
    record: &GammaStarRecord,
    p: &MatrixPolynomial,
    mu: Complex64,
    coalescence_tol: f64,
) -> Result<CorrectionResult> {
    if !record.coalesced {
        return Err(Error::NotCoalesced { gap: record.gap });
    }
    if let Some(next) = record.s_next {
        if next - record.s_star <= coalescence_tol * record.s_star {
            return Err(Error::HigherCoalescence);
        }
    }
    let dp = p.derivative_value(mu);
    let m = build_m_with(&dp, &record.triplet_a, &record.triplet_b)?;
    let sol = solve_null_form(&m.m)?;
    combine_with(&dp, &sol, &record.triplet_a, &record.triplet_b, m)
}
