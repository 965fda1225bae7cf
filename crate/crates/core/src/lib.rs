//! Distance bounds from a matrix polynomial `P(λ)` to the set of matrix
//! polynomials that have a prescribed scalar `μ` as a multiple eigenvalue,
//! together with the construction of a perturbed polynomial `Q(λ)` that
//! realizes the bound.
//!
//! The pipeline is:
//!
//! 1. [`pencil::maximize_gamma`] maximizes `s_{2n-1}` of the block matrix
//!    `F[P(μ); γ] = [[P(μ), 0], [γ P'(μ), P(μ)]]` over `γ ≥ 0`.
//! 2. When the maximum sits at a coalescence of two singular values (the
//!    typical situation for normal polynomials), [`corrector`] mixes the two
//!    singular pairs so the mixed pair has zero slope.
//! 3. [`perturbation`] builds the rank-two perturbation, distributes it over
//!    the coefficients by the weights and verifies that `μ` is a multiple
//!    eigenvalue of `Q`.
//!
//! [`analysis::analyze`] runs the whole sequence.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod corrector;
pub mod densela;
pub mod error;
pub mod matpoly;
pub mod pencil;
pub mod perturbation;
pub mod problem;
pub mod report;

pub use num_complex::Complex64;

pub use analysis::{analyze, Analysis, AnalysisOptions, Mode, PathTaken};
pub use error::{Error, Result};
pub use matpoly::{MatrixPolynomial, WeightSet};
pub use pencil::{GammaOptions, GammaStarRecord, SingularTriplet};
pub use perturbation::{Verdict, VerificationReport};

/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<Complex64>;
