//! Matrix polynomials `P(λ) = A_m λ^m + … + A_1 λ + A_0` and the weight
//! polynomial `w(t) = ω_m t^m + … + ω_0` used to spread a perturbation over
//! the coefficients.

use num_complex::Complex64;

use crate::densela;
use crate::error::{Error, Result};
use crate::CMat;

/// Relative threshold for the nonsingularity of the leading coefficient.
pub const LEADING_COEFF_TOL: f64 = 1e-12;

/// Default relative tolerance of [`is_weakly_normal`].
pub const NORMALITY_TOL: f64 = 1e-10;

/// Square matrix polynomial with a nonsingular leading coefficient.
///
/// Coefficients are stored in ascending order `A_0, …, A_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    coeffs: Vec<CMat>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<CMat>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidPolynomial("no coefficients".into()))?;
        let n = first.nrows();
        if n == 0 {
            return Err(Error::InvalidPolynomial(
                "zero-dimensional coefficients".into(),
            ));
        }
        for (j, a) in coeffs.iter().enumerate() {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::InvalidPolynomial(format!(
                    "coefficient {j} is {}x{}, expected {n}x{n}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }

        let lead = coeffs.last().unwrap();
        let s = densela::singular_values(lead)?;
        let norm = s[0];
        let sigma_min = *s.last().unwrap();
        if !(sigma_min > LEADING_COEFF_TOL * norm) {
            return Err(Error::SingularLeadingCoefficient { sigma_min, norm });
        }
        Ok(Self { coeffs })
    }

    /// Matrix dimension `n`.
    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    /// Degree `m`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &CMat {
        &self.coeffs[j]
    }

    /// `P(z)` by Horner's rule.
    pub fn evaluate(&self, z: Complex64) -> CMat {
        let mut acc = self.coeffs.last().unwrap().clone();
        for a in self.coeffs.iter().rev().skip(1) {
            acc *= z;
            acc += a;
        }
        acc
    }

    /// `P'(z)` without materializing the derivative polynomial. Zero for a
    /// constant polynomial.
    pub fn derivative_value(&self, z: Complex64) -> CMat {
        let n = self.dim();
        let m = self.degree();
        if m == 0 {
            return CMat::zeros(n, n);
        }
        let mut acc = &self.coeffs[m] * Complex64::from(m as f64);
        for j in (1..m).rev() {
            acc *= z;
            acc += &self.coeffs[j] * Complex64::from(j as f64);
        }
        acc
    }

    /// The derivative polynomial, of degree `m - 1`.
    pub fn derivative(&self) -> Result<Self> {
        if self.degree() == 0 {
            return Err(Error::InvalidArgument(
                "derivative of a degree-0 polynomial".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, a)| a * Complex64::from(j as f64))
            .collect();
        // m·A_m is nonsingular whenever A_m is.
        Ok(Self { coeffs })
    }
}

/// Nonnegative weights `ω_0, …, ω_m` with `ω_0 > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    weights: Vec<f64>,
}

impl WeightSet {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty weight list".into()));
        }
        if let Some((j, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidWeights(format!(
                "weight {j} = {w} is not a nonnegative number"
            )));
        }
        if weights[0] <= 0.0 {
            return Err(Error::InvalidWeights("omega_0 must be positive".into()));
        }
        Ok(Self { weights })
    }

    /// All-ones weights for a degree-`m` polynomial.
    pub fn uniform(m: usize) -> Self {
        Self {
            weights: vec![1.0; m + 1],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn check_compatible(&self, p: &MatrixPolynomial) -> Result<()> {
        if self.degree() != p.degree() {
            return Err(Error::InvalidWeights(format!(
                "{} weights given for a degree-{} polynomial",
                self.weights.len(),
                p.degree()
            )));
        }
        Ok(())
    }

    /// `w(t)`.
    pub fn value(&self, t: f64) -> Result<f64> {
        check_nonnegative(t)?;
        Ok(self.weights.iter().rev().fold(0.0, |acc, w| acc * t + w))
    }

    /// `w'(t)`.
    pub fn slope(&self, t: f64) -> Result<f64> {
        check_nonnegative(t)?;
        Ok(self
            .weights
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (j, w)| acc * t + j as f64 * w))
    }
}

fn check_nonnegative(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "weight polynomial evaluated at negative t = {t}"
        )))
    }
}

/// `μ̄/|μ|`, with the value 0 at `μ = 0`.
pub fn unit_conj(mu: Complex64) -> Complex64 {
    let r = mu.norm();
    if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        mu.conj() / r
    }
}

/// `φ = w'(|μ|)/w(|μ|) · μ̄/|μ|`, zero at `μ = 0`.
pub fn phi(w: &WeightSet, mu: Complex64) -> Complex64 {
    let r = mu.norm();
    // w(r) ≥ ω_0 > 0 and r ≥ 0, so neither call can fail.
    let ratio = w.slope(r).unwrap() / w.value(r).unwrap();
    unit_conj(mu) * ratio
}

/// Where the worst normality residual was observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormalityWitness {
    Coefficient(usize),
    Point(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityReport {
    pub weakly_normal: bool,
    /// Largest relative residual `‖AA* − A*A‖₂ / ‖A‖₂²` observed.
    pub worst_residual: f64,
    pub witness: NormalityWitness,
}

fn normality_residual(a: &CMat) -> f64 {
    let norm = densela::spectral_norm(a);
    if norm == 0.0 {
        return 0.0;
    }
    let comm = a * a.adjoint() - a.adjoint() * a;
    densela::spectral_norm(&comm) / (norm * norm)
}

/// Finite test for weak normality: every coefficient and `P(z_k)` at the
/// `m + 1` roots of unity `z_k = e^{2πik/(m+1)}` must be normal to the given
/// relative tolerance.
///
/// Passing is necessary but not sufficient for normality of `P(z)` at every
/// `z`.
pub fn is_weakly_normal(p: &MatrixPolynomial, tol: f64) -> NormalityReport {
    let mut worst = (0.0, NormalityWitness::Coefficient(0));
    let mut consider = |r: f64, w: NormalityWitness| {
        if r > worst.0 {
            worst = (r, w);
        }
    };
    for (j, a) in p.coeffs().iter().enumerate() {
        consider(normality_residual(a), NormalityWitness::Coefficient(j));
    }
    let count = p.degree() + 1;
    for k in 0..count {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / count as f64);
        consider(
            normality_residual(&p.evaluate(z)),
            NormalityWitness::Point(z),
        );
    }
    NormalityReport {
        weakly_normal: worst.0 <= tol,
        worst_residual: worst.0,
        witness: worst.1,
    }
}
