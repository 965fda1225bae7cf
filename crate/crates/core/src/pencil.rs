//! The block matrix `F[P(μ); γ] = [[P(μ), 0], [γ P'(μ), P(μ)]]` and the
//! one-dimensional maximization of its second-smallest singular value
//! `s_{2n-1}` over `γ ≥ 0`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::densela::{self, SvdResult};
use crate::error::{Error, Result};
use crate::matpoly::MatrixPolynomial;
use crate::{CMat, CVec};

/// A singular value of `F` with its unit left/right vectors of length `2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriplet {
    pub s: f64,
    pub u: CVec,
    pub v: CVec,
}

impl SingularTriplet {
    /// Half-dimension `n`.
    pub fn half(&self) -> usize {
        self.u.len() / 2
    }

    pub fn u1(&self) -> CVec {
        self.u.rows(0, self.half()).into_owned()
    }

    pub fn u2(&self) -> CVec {
        let n = self.half();
        self.u.rows(n, n).into_owned()
    }

    pub fn v1(&self) -> CVec {
        self.v.rows(0, self.half()).into_owned()
    }

    pub fn v2(&self) -> CVec {
        let n = self.half();
        self.v.rows(n, n).into_owned()
    }

    /// `[u₁ u₂]`, an `n × 2` matrix.
    pub fn u_mat(&self) -> CMat {
        CMat::from_columns(&[self.u1(), self.u2()])
    }

    /// `[v₁ v₂]`, an `n × 2` matrix.
    pub fn v_mat(&self) -> CMat {
        CMat::from_columns(&[self.v1(), self.v2()])
    }

    fn from_svd(dec: &SvdResult, i: usize) -> Self {
        Self {
            s: dec.values[i],
            u: dec.u_col(i),
            v: dec.v_col(i),
        }
    }
}

/// Value of `u₂* P'(μ) v₁`: the real part is the derivative of the singular
/// value with respect to `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slope {
    pub value: f64,
    pub imag_residue: f64,
}

/// Sample of the two smallest-but-one singular values along `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub gamma: f64,
    /// `s_{2n-2}`.
    pub s_hi: f64,
    /// `s_{2n-1}`.
    pub s_lo: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaOptions {
    /// Initial right end of the search interval.
    pub gamma_max: f64,
    /// Number of coarse grid intervals.
    pub grid: usize,
    /// Golden-section termination width.
    pub gamma_tol: f64,
    /// Relative gap below which `s_{2n-1}` and `s_{2n-2}` count as coalesced.
    pub coalescence_tol: f64,
}

impl Default for GammaOptions {
    fn default() -> Self {
        Self {
            gamma_max: 10.0,
            grid: 200,
            gamma_tol: 1e-10,
            coalescence_tol: 1e-6,
        }
    }
}

/// Number of times `gamma_max` may be doubled when the grid maximum sits at
/// the right endpoint.
pub const MAX_DOUBLINGS: u32 = 10;

/// `s*` below this multiple of `‖F‖₂` means `μ` is already a (geometrically)
/// multiple eigenvalue.
pub const ZERO_DISTANCE_TOL: f64 = 1e-12;

/// Result of [`maximize_gamma`].
#[derive(Debug, Clone)]
pub struct GammaStarRecord {
    pub gamma_star: f64,
    pub s_star: f64,
    /// Triplet of `s_{2n-1}`.
    pub triplet_a: SingularTriplet,
    /// Triplet of `s_{2n-2}`.
    pub triplet_b: SingularTriplet,
    pub coalesced: bool,
    /// `s_{2n-2} - s_{2n-1}` at `γ*`.
    pub gap: f64,
    pub slope_a: Slope,
    pub slope_b: Slope,
    /// `s_{2n-3}` at `γ*`, used to detect a triple coalescence.
    pub s_next: Option<f64>,
    /// `‖F[P(μ); γ*]‖₂`.
    pub f_norm: f64,
    /// Right end of the interval that was finally scanned.
    pub gamma_max: f64,
}

/// `P(μ)` and `P'(μ)` cached for repeated evaluation of `F` along `γ`.
#[derive(Debug, Clone)]
pub struct Pencil {
    p_mu: CMat,
    dp_mu: CMat,
}

impl Pencil {
    pub fn new(p: &MatrixPolynomial, mu: Complex64) -> Self {
        Self {
            p_mu: p.evaluate(mu),
            dp_mu: p.derivative_value(mu),
        }
    }

    pub fn dim(&self) -> usize {
        self.p_mu.nrows()
    }

    pub fn p_mu(&self) -> &CMat {
        &self.p_mu
    }

    pub fn dp_mu(&self) -> &CMat {
        &self.dp_mu
    }

    pub fn matrix(&self, gamma: f64) -> CMat {
        let n = self.dim();
        let mut f = CMat::zeros(2 * n, 2 * n);
        f.view_mut((0, 0), (n, n)).copy_from(&self.p_mu);
        f.view_mut((n, n), (n, n)).copy_from(&self.p_mu);
        f.view_mut((n, 0), (n, n))
            .copy_from(&(&self.dp_mu * Complex64::from(gamma)));
        f
    }

    fn check_pair_dim(&self) -> Result<()> {
        if self.dim() < 2 {
            return Err(Error::Dimension("s_2n-2 requires n >= 2".into()));
        }
        Ok(())
    }

    pub fn svd(&self, gamma: f64) -> Result<SvdResult> {
        check_gamma(gamma)?;
        densela::svd(&self.matrix(gamma))
    }

    /// Triplets of `s_{2n-1}` and `s_{2n-2}`.
    pub fn sigma_pair(&self, gamma: f64) -> Result<(SingularTriplet, SingularTriplet)> {
        self.check_pair_dim()?;
        let dec = self.svd(gamma)?;
        let n = self.dim();
        Ok((
            SingularTriplet::from_svd(&dec, 2 * n - 2),
            SingularTriplet::from_svd(&dec, 2 * n - 3),
        ))
    }

    pub fn curve_sample(&self, gamma: f64) -> Result<CurveSample> {
        self.check_pair_dim()?;
        check_gamma(gamma)?;
        let s = densela::singular_values(&self.matrix(gamma))?;
        let n = self.dim();
        Ok(CurveSample {
            gamma,
            s_hi: s[2 * n - 3],
            s_lo: s[2 * n - 2],
        })
    }

    fn s_lo(&self, gamma: f64) -> Result<f64> {
        self.curve_sample(gamma).map(|c| c.s_lo)
    }

    /// `u₂* P'(μ) v₁` for a triplet of this pencil.
    pub fn slope(&self, t: &SingularTriplet) -> Slope {
        let z = (t.u2().adjoint() * &self.dp_mu * t.v1())[(0, 0)];
        Slope {
            value: z.re,
            imag_residue: z.im.abs(),
        }
    }

    fn slope_lo(&self, gamma: f64) -> Result<f64> {
        let (a, _) = self.sigma_pair(gamma)?;
        Ok(self.slope(&a).value)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "gamma must be a nonnegative number, got {gamma}"
        )))
    }
}

/// `F[P(μ); γ]`.
pub fn build_f(p: &MatrixPolynomial, mu: Complex64, gamma: f64) -> Result<CMat> {
    check_gamma(gamma)?;
    Ok(Pencil::new(p, mu).matrix(gamma))
}

/// Triplets of `s_{2n-1}` and `s_{2n-2}` of `F[P(μ); γ]`.
pub fn sigma_pair(
    p: &MatrixPolynomial,
    mu: Complex64,
    gamma: f64,
) -> Result<(SingularTriplet, SingularTriplet)> {
    Pencil::new(p, mu).sigma_pair(gamma)
}

/// `Re(u₂* P'(μ) v₁)` with the size of the discarded imaginary part.
pub fn singular_slope(t: &SingularTriplet, p: &MatrixPolynomial, mu: Complex64) -> Slope {
    Pencil::new(p, mu).slope(t)
}

/// Uniformly spaced samples of `(s_{2n-1}, s_{2n-2})` on `[gamma_lo, gamma_hi]`.
pub fn sample_curve(
    p: &MatrixPolynomial,
    mu: Complex64,
    gamma_lo: f64,
    gamma_hi: f64,
    count: usize,
) -> Result<Vec<CurveSample>> {
    if !(gamma_lo >= 0.0 && gamma_lo < gamma_hi && gamma_hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "invalid gamma range [{gamma_lo}, {gamma_hi}]"
        )));
    }
    if count < 2 {
        return Err(Error::InvalidArgument(
            "curve needs at least 2 samples".into(),
        ));
    }
    let pencil = Pencil::new(p, mu);
    let last = (count - 1) as f64;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let gamma = if i + 1 == count {
                gamma_hi
            } else {
                gamma_lo + (gamma_hi - gamma_lo) * i as f64 / last
            };
            pencil.curve_sample(gamma)
        })
        .collect()
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Returns the best point seen and its value.
fn golden_section_maximize(
    f: impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };

    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(best)
}

/// Bisection on the sign of the `s_{2n-1}` slope, from a left end with
/// positive slope to a right end with negative slope. Converges to a smooth
/// maximum (zero slope) or to a crossing of two branches (slope sign
/// change) at full precision.
fn bisect_slope(pencil: &Pencil, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..200 {
        if hi - lo <= 2.0 * f64::EPSILON * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let slope = pencil.slope_lo(mid)?;
        if slope > 0.0 {
            lo = mid;
        } else if slope < 0.0 {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximize `s_{2n-1}(F[P(μ); γ])` over `γ ≥ 0`.
///
/// A coarse grid on `[0, γ_max]` locates the bracket (doubling `γ_max` while
/// the best sample sits on the right end), golden-section search refines it,
/// and a final bisection on the slope sign pins the maximizer down to
/// machine precision.
pub fn maximize_gamma(
    p: &MatrixPolynomial,
    mu: Complex64,
    opts: &GammaOptions,
) -> Result<GammaStarRecord> {
    if !(opts.gamma_max > 0.0) || opts.grid < 2 || !(opts.gamma_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid gamma options {opts:?}"
        )));
    }
    let pencil = Pencil::new(p, mu);
    pencil.check_pair_dim()?;

    let mut gamma_max = opts.gamma_max;
    let mut doublings = 0;
    let (k, grid_values) = loop {
        let step = gamma_max / opts.grid as f64;
        let values = (0..=opts.grid)
            .into_par_iter()
            .map(|i| pencil.s_lo(step * i as f64))
            .collect::<Result<Vec<f64>>>()?;
        let mut k = 0;
        for (i, &s) in values.iter().enumerate() {
            if s > values[k] {
                k = i;
            }
        }
        if k == opts.grid {
            if doublings < MAX_DOUBLINGS {
                doublings += 1;
                gamma_max *= 2.0;
                continue;
            }
            return Err(Error::Unbracketed { gamma_max });
        }
        break (k, values);
    };

    let step = gamma_max / opts.grid as f64;
    let norm_scale = densela::spectral_norm(&pencil.matrix(step * k as f64));
    if grid_values[k] <= ZERO_DISTANCE_TOL * norm_scale {
        return Err(Error::AlreadyMultiple {
            s_star: grid_values[k],
        });
    }

    let lo = step * k.saturating_sub(1) as f64;
    let hi = step * (k + 1) as f64;
    let (mut gamma, mut best) = (step * k as f64, grid_values[k]);
    let (g, s) = golden_section_maximize(|x| pencil.s_lo(x), lo, hi, opts.gamma_tol)?;
    if s > best {
        gamma = g;
        best = s;
    }

    if lo > 0.0 && pencil.slope_lo(lo)? > 0.0 && pencil.slope_lo(hi)? < 0.0 {
        let refined = bisect_slope(&pencil, lo, hi)?;
        let s = pencil.s_lo(refined)?;
        if s >= best - 1e-12 * best {
            gamma = refined;
        }
    } else if k == 0 {
        // Only possible interior maximum is right of the origin; the slope at
        // 0 itself is not defined (every singular value is double there).
        if pencil.slope_lo(hi)? < 0.0 && gamma > 0.0 && pencil.slope_lo(gamma.min(hi))? > 0.0 {
            let refined = bisect_slope(&pencil, gamma, hi)?;
            if pencil.s_lo(refined)? >= best - 1e-12 * best {
                gamma = refined;
            }
        }
    }

    if gamma <= 10.0 * opts.gamma_tol {
        return Err(Error::GammaAtOrigin);
    }

    let dec = pencil.svd(gamma)?;
    let n = pencil.dim();
    let triplet_a = SingularTriplet::from_svd(&dec, 2 * n - 2);
    let triplet_b = SingularTriplet::from_svd(&dec, 2 * n - 3);
    let s_star = triplet_a.s;
    let f_norm = dec.max();
    if s_star <= ZERO_DISTANCE_TOL * f_norm {
        return Err(Error::AlreadyMultiple { s_star });
    }
    let gap = triplet_b.s - triplet_a.s;
    let s_next = (2 * n >= 4).then(|| dec.values[2 * n - 4]);
    Ok(GammaStarRecord {
        gamma_star: gamma,
        s_star,
        slope_a: pencil.slope(&triplet_a),
        slope_b: pencil.slope(&triplet_b),
        triplet_a,
        triplet_b,
        coalesced: gap <= opts.coalescence_tol * s_star,
        gap,
        s_next,
        f_norm,
        gamma_max,
    })
}
