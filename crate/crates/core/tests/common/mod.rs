//! Random generators shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use polydist::densela::singular_values;
use polydist::{CMat, Complex64, MatrixPolynomial};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// `POLYDIST_SEED` or the fixed default.
pub fn seed() -> u64 {
    std::env::var("POLYDIST_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn random_complex(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| random_complex(rng, 1.0))
}

/// Unitary factor of the QR decomposition of a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    random_matrix(rng, n, n).qr().q()
}

/// `W · diag(d_i(λ)) · W*` with random unitary `W` and random scalar
/// polynomials whose leading coefficients have modulus in `[0.5, 2)`.
pub fn random_normal(rng: &mut ChaCha8Rng, n: usize, m: usize) -> MatrixPolynomial {
    let w = random_unitary(rng, n);
    let d: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..=m)
                .map(|j| {
                    if j == m {
                        Complex64::from_polar(
                            rng.gen_range(0.5..2.0),
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        )
                    } else {
                        random_complex(rng, 2.0)
                    }
                })
                .collect()
        })
        .collect();
    let coeffs = (0..=m)
        .map(|j| {
            let dj = CMat::from_fn(n, n, |r, k| {
                if r == k {
                    d[r][j]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            &w * dj * w.adjoint()
        })
        .collect();
    MatrixPolynomial::new(coeffs).unwrap()
}

/// Dense random coefficients with an identity-dominated leading term.
pub fn random_general(rng: &mut ChaCha8Rng, n: usize, m: usize) -> MatrixPolynomial {
    let coeffs = (0..=m)
        .map(|j| {
            let a = random_matrix(rng, n, n);
            if j == m {
                a * Complex64::new(0.3, 0.0) + CMat::identity(n, n)
            } else {
                a
            }
        })
        .collect();
    MatrixPolynomial::new(coeffs).unwrap()
}

pub fn smin_ratio(a: &CMat) -> f64 {
    let s = singular_values(a).unwrap();
    s[s.len() - 1] / s[0]
}

/// A random `μ` in the square `|re|, |im| < 2` that is well separated from
/// the eigenvalues of both `P` and `P'`.
pub fn admissible_mu(rng: &mut ChaCha8Rng, p: &MatrixPolynomial) -> Complex64 {
    loop {
        let z = random_complex(rng, 2.0);
        if smin_ratio(&p.evaluate(z)) > 1e-3 && smin_ratio(&p.derivative_value(z)) > 1e-3 {
            return z;
        }
    }
}
