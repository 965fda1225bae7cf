//! Dense complex linear algebra used by the rest of the crate.
//!
//! The SVD itself is delegated to `nalgebra`; this module adds descending
//! ordering, a reproducible phase convention, and the small special-purpose
//! kernels (2×2 Hermitian eigendecomposition, thin pseudoinverse,
//! determinant slope) the construction needs.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matpoly::MatrixPolynomial;
use crate::{CMat, CVec};

/// Relative cutoff below which singular values are treated as zero by
/// [`pinv_thin`].
pub const PINV_CUTOFF: f64 = 1e-12;

/// Relative Hermitian tolerance accepted by [`herm_eig_2x2`].
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Singular value decomposition `A = Σ s_i u_i v_i*`.
///
/// Singular values are sorted in descending order. Columns of `u` and `v`
/// are the left and right singular vectors. Each pair is scaled by a unit
/// phase so that the largest-modulus entry of `v_i` is real and positive
/// (ties go to the lowest index); `u_i` follows from `A v_i = s_i u_i`.
///
/// For square input the decomposition is full. For rectangular input it is
/// thin (`min(k, l)` columns).
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub values: Vec<f64>,
    pub u: CMat,
    pub v: CMat,
}

impl SvdResult {
    pub fn u_col(&self, i: usize) -> CVec {
        self.u.column(i).into_owned()
    }

    pub fn v_col(&self, i: usize) -> CVec {
        self.v.column(i).into_owned()
    }

    /// Smallest singular value.
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Largest singular value.
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

fn check_finite(a: &CMat) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Index of the entry of largest modulus; near-ties (within a relative
/// 1e-10) go to the lowest index.
fn pivot_index<'a>(entries: impl Iterator<Item = &'a Complex64> + Clone) -> Option<usize> {
    let max = entries.clone().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if max == 0.0 {
        return None;
    }
    entries
        .enumerate()
        .find(|(_, z)| z.norm() >= max * (1.0 - 1e-10))
        .map(|(i, _)| i)
}

/// Unit phase `c` such that `c * x` has its pivot entry real and positive.
pub fn phase_factor<'a>(x: impl Iterator<Item = &'a Complex64> + Clone) -> Complex64 {
    let entries: Vec<&Complex64> = x.clone().collect();
    match pivot_index(x) {
        Some(i) => {
            let z = *entries[i];
            z.conj() / z.norm()
        }
        None => Complex64::new(1.0, 0.0),
    }
}

/// Scale `x` in place so its pivot entry is real and positive.
pub fn normalize_phase(x: &mut CVec) -> Complex64 {
    let c = phase_factor(x.iter());
    *x *= c;
    c
}

/// Full (square) or thin (rectangular) SVD with descending values and the
/// phase convention described on [`SvdResult`].
pub fn svd(a: &CMat) -> Result<SvdResult> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::InvalidArgument("svd of an empty matrix".into()));
    }
    check_finite(a)?;

    let dec = a.clone().svd(true, true);
    let u_raw = dec.u.expect("left vectors requested");
    let vt_raw = dec.v_t.expect("right vectors requested");
    let k = dec.singular_values.len();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        dec.singular_values[j]
            .partial_cmp(&dec.singular_values[i])
            .unwrap()
            .then(i.cmp(&j))
    });

    let mut values = Vec::with_capacity(k);
    let mut u = CMat::zeros(a.nrows(), k);
    let mut v = CMat::zeros(a.ncols(), k);
    for (dst, &src) in order.iter().enumerate() {
        values.push(dec.singular_values[src].max(0.0));
        let mut vi: CVec = vt_raw.row(src).adjoint();
        let mut ui: CVec = u_raw.column(src).into_owned();
        let c = normalize_phase(&mut vi);
        ui *= c;
        u.set_column(dst, &ui);
        v.set_column(dst, &vi);
    }
    Ok(SvdResult { values, u, v })
}

/// Singular values only, descending.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    check_finite(a)?;
    let mut s: Vec<f64> = a
        .clone()
        .singular_values()
        .iter()
        .map(|x| x.max(0.0))
        .collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(s)
}

/// Spectral norm ‖A‖₂. Empty matrices have norm zero.
pub fn spectral_norm(a: &CMat) -> f64 {
    singular_values(a)
        .map(|s| s.first().copied().unwrap_or(0.0))
        .unwrap_or(f64::NAN)
}

fn spectral_norm2(m: &Matrix2<Complex64>) -> f64 {
    spectral_norm(&CMat::from_iterator(2, 2, m.iter().copied()))
}

/// Eigendecomposition of a 2×2 Hermitian matrix.
#[derive(Debug, Clone, Copy)]
pub struct HermEig2 {
    /// `λ₁ ≥ λ₂`.
    pub values: [f64; 2],
    /// Unitary matrix whose columns are the eigenvectors of `values[0]` and
    /// `values[1]`, each phase-normalized.
    pub vectors: Matrix2<Complex64>,
}

/// Closed-form eigendecomposition of a 2×2 Hermitian matrix.
///
/// The input may carry a small anti-Hermitian part (relative size up to
/// [`HERMITIAN_TOL`]); the Hermitian part is decomposed.
pub fn herm_eig_2x2(m: &Matrix2<Complex64>) -> Result<HermEig2> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let norm = spectral_norm2(m);
    let skew = spectral_norm2(&(m - m.adjoint()));
    if skew > HERMITIAN_TOL * norm {
        return Err(Error::NotHermitian {
            residual: skew / norm,
        });
    }

    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    let (l1, l2) = (mean + r, mean - r);

    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut x = if b.norm() == 0.0 {
        if a >= d {
            Vector2::new(one, zero)
        } else {
            Vector2::new(zero, one)
        }
    } else {
        // Two algebraically equivalent null vectors of (M - λ₁I); keep the
        // better-conditioned one.
        let first = Vector2::new(b, Complex64::from(l1 - a));
        let second = Vector2::new(Complex64::from(l1 - d), b.conj());
        if first.norm() >= second.norm() {
            first
        } else {
            second
        }
    };
    x /= Complex64::from(x.norm());
    let mut y = Vector2::new(-x[1].conj(), x[0].conj());
    x *= phase_factor(x.iter());
    y *= phase_factor(y.iter());

    Ok(HermEig2 {
        values: [l1, l2],
        vectors: Matrix2::from_columns(&[x, y]),
    })
}

/// Moore–Penrose pseudoinverse computed through the SVD.
#[derive(Debug, Clone)]
pub struct PseudoInverse {
    pub matrix: CMat,
    /// Number of singular values kept.
    pub rank: usize,
    /// True when at least one singular value was truncated to zero.
    pub truncated: bool,
}

/// Pseudoinverse of a thin matrix (typically `n × 2`). Singular values below
/// `PINV_CUTOFF · s₁` are treated as zero.
pub fn pinv_thin(v: &CMat) -> Result<PseudoInverse> {
    let dec = svd(v)?;
    let cutoff = PINV_CUTOFF * dec.max();
    let mut matrix = CMat::zeros(v.ncols(), v.nrows());
    let mut rank = 0;
    for (i, &s) in dec.values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            rank += 1;
            let vi = dec.v.column(i);
            let ui = dec.u.column(i);
            matrix += vi * ui.adjoint() * Complex64::from(1.0 / s);
        }
    }
    let truncated = rank < dec.values.len();
    Ok(PseudoInverse {
        matrix,
        rank,
        truncated,
    })
}

/// Determinant via LU with partial pivoting.
pub fn determinant(a: &CMat) -> Complex64 {
    if a.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    a.clone().lu().determinant()
}

/// `det Q(μ)` and `d/dλ det Q(λ)` at `λ = μ`.
///
/// The slope is Jacobi's formula `tr(adj(Q(μ)) Q'(μ))`, evaluated as the sum
/// over columns of determinants of `Q(μ)` with that column replaced by the
/// matching column of `Q'(μ)`. This stays well defined when `Q(μ)` is
/// singular.
pub fn det_and_slope(q: &MatrixPolynomial, mu: Complex64) -> (Complex64, Complex64) {
    let value = q.evaluate(mu);
    let slope_matrix = q.derivative_value(mu);
    let det = determinant(&value);
    let mut slope = Complex64::new(0.0, 0.0);
    for i in 0..value.ncols() {
        let mut replaced = value.clone();
        replaced.set_column(i, &slope_matrix.column(i));
        slope += determinant(&replaced);
    }
    (det, slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMat {
        CMat::from_row_iterator(rows, cols, data.iter().map(|&x| c(x)))
    }

    #[test]
    fn svd_of_diagonal_is_sorted() {
        let a = real(3, 3, &[2.0, 0.0, 0.0, 0.0, 6.0, 0.0, 0.0, 0.0, 20.0]);
        let s = svd(&a).unwrap();
        assert_eq!(s.values.len(), 3);
        for (got, want) in s.values.iter().zip([20.0, 6.0, 2.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn svd_of_lower_triangular_block() {
        // Gram matrix [[13,6],[6,4]] has eigenvalues 16 and 1.
        let a = real(2, 2, &[2.0, 0.0, 3.0, 2.0]);
        let s = svd(&a).unwrap();
        assert!((s.values[0] - 4.0).abs() < 1e-13);
        assert!((s.values[1] - 1.0).abs() < 1e-13);
        for i in 0..2 {
            let r = &a * s.v_col(i) - s.u_col(i) * c(s.values[i]);
            assert!(r.norm() < 1e-12 * 4.0);
        }
    }

    #[test]
    fn svd_of_zero_matrix() {
        let s = svd(&CMat::zeros(3, 3)).unwrap();
        assert!(s.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn svd_rejects_non_finite() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(svd(&a).unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn svd_right_vectors_follow_phase_convention() {
        let a = CMat::from_row_iterator(
            2,
            2,
            [
                Complex64::new(1.0, 2.0),
                c(0.5),
                Complex64::new(0.0, -1.0),
                c(3.0),
            ],
        );
        let s = svd(&a).unwrap();
        for i in 0..2 {
            let v = s.v_col(i);
            let k = pivot_index(v.iter()).unwrap();
            assert!(v[k].im.abs() < 1e-15 && v[k].re > 0.0);
        }
    }

    #[test]
    fn spectral_norms() {
        assert!((spectral_norm(&CMat::identity(4, 4)) - 1.0).abs() < 1e-14);
        let d = real(3, 3, &[2.0, 0.0, 0.0, 0.0, 6.0, 0.0, 0.0, 0.0, 20.0]);
        assert!((spectral_norm(&d) - 20.0).abs() < 1e-13);
        assert!((spectral_norm(&real(2, 2, &[2.0, 0.0, 3.0, 2.0])) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn herm_eig_diagonal_keeps_order_by_value() {
        let m = Matrix2::new(c(2.4), c(0.0), c(0.0), c(-1.5385));
        let e = herm_eig_2x2(&m).unwrap();
        assert!((e.values[0] - 2.4).abs() < 1e-15);
        assert!((e.values[1] + 1.5385).abs() < 1e-15);
        assert!((e.vectors - Matrix2::identity()).norm() < 1e-15);

        let swapped = Matrix2::new(c(-1.5385), c(0.0), c(0.0), c(2.4));
        let e = herm_eig_2x2(&swapped).unwrap();
        assert!((e.values[0] - 2.4).abs() < 1e-15);
        assert!((e.vectors[(1, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn herm_eig_exchange_matrix() {
        let m = Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0));
        let e = herm_eig_2x2(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn herm_eig_constant_diagonal_closed_form() {
        let a = 0.7;
        let b = Complex64::new(0.3, -1.1);
        let m = Matrix2::new(c(a), b, b.conj(), c(a));
        let e = herm_eig_2x2(&m).unwrap();
        assert!((e.values[0] - (a + b.norm())).abs() < 1e-14);
        assert!((e.values[1] - (a - b.norm())).abs() < 1e-14);
        let d = Matrix2::from_diagonal(&Vector2::new(c(e.values[0]), c(e.values[1])));
        let rebuilt = e.vectors * d * e.vectors.adjoint();
        assert!((rebuilt - m).norm() < 1e-12 * spectral_norm2(&m));
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = Matrix2::new(c(1.0), c(2.0), c(0.0), c(1.0));
        assert!(matches!(herm_eig_2x2(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn pinv_of_isometry_is_adjoint() {
        let s = 1.0 / 2f64.sqrt();
        let v = real(3, 2, &[s, 0.0, s, 0.0, 0.0, 1.0]);
        let p = pinv_thin(&v).unwrap();
        assert!((p.matrix - v.adjoint()).norm() < 1e-14);
        assert_eq!(p.rank, 2);
        assert!(!p.truncated);
    }

    #[test]
    fn pinv_of_scaled_unit_columns() {
        let v = real(3, 2, &[2.0, 0.0, 0.0, 4.0, 0.0, 0.0]);
        let p = pinv_thin(&v).unwrap();
        let want = real(2, 3, &[0.5, 0.0, 0.0, 0.0, 0.25, 0.0]);
        assert!((p.matrix - want).norm() < 1e-15);
    }

    #[test]
    fn pinv_of_rank_one_repeated_column() {
        let col = [Complex64::new(1.0, 1.0), c(-2.0), Complex64::new(0.0, 0.5)];
        let v = CMat::from_fn(3, 2, |i, _| col[i]);
        let p = pinv_thin(&v).unwrap();
        assert_eq!(p.rank, 1);
        assert!(p.truncated);
        let norm2: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        for j in 0..2 {
            for (i, z) in col.iter().enumerate() {
                let want = z.conj() / (2.0 * norm2);
                assert!((p.matrix[(j, i)] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn det_slope_of_scalar_double_root() {
        // (λ - 3)^2 = λ² - 6λ + 9
        let q = MatrixPolynomial::new(vec![
            real(1, 1, &[9.0]),
            real(1, 1, &[-6.0]),
            real(1, 1, &[1.0]),
        ])
        .unwrap();
        let (d, s) = det_and_slope(&q, c(3.0));
        assert!(d.norm() < 1e-13 && s.norm() < 1e-13);
    }

    #[test]
    fn det_slope_of_diagonal_linear() {
        // diag(λ-3, λ-1)
        let q = MatrixPolynomial::new(vec![
            real(2, 2, &[-3.0, 0.0, 0.0, -1.0]),
            CMat::identity(2, 2),
        ])
        .unwrap();
        let (d, s) = det_and_slope(&q, c(3.0));
        assert!(d.norm() < 1e-14);
        assert!((s - c(2.0)).norm() < 1e-14);
    }
}
