use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error(
        "leading coefficient is numerically singular (s_min = {sigma_min:e}, norm = {norm:e})"
    )]
    SingularLeadingCoefficient { sigma_min: f64, norm: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("s* = {s_star:e} is numerically zero: mu is already an eigenvalue of geometric multiplicity >= 2")]
    AlreadyMultiple { s_star: f64 },

    #[error("s_2n-1 attains its maximum at gamma = 0; the construction requires gamma* > 0")]
    GammaAtOrigin,

    #[error("maximum of s_2n-1 not bracketed on [0, {gamma_max}]")]
    Unbracketed { gamma_max: f64 },

    #[error("branch pairing inconsistent: M deviates from Hermitian by {residual:e} (relative)")]
    BranchPairing { residual: f64 },

    #[error("correction requires coalesced branches (gap {gap:e})")]
    NotCoalesced { gap: f64 },

    #[error("more than two singular values coalesce at gamma*")]
    HigherCoalescence,

    #[error(
        "form is definite (lambda1 * lambda2 = {product:e}); coalescence correction inapplicable"
    )]
    DefiniteForm { product: f64 },

    #[error("correction failed: post-correction slope {slope:e}")]
    CorrectionFailed { slope: f64 },

    #[error("input error in `{field}`: {message}")]
    Input { field: String, message: String },
}

impl Error {
    /// Stable machine-readable identifier, used in reports and by the C API.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidPolynomial(_) => "invalid_polynomial",
            Error::SingularLeadingCoefficient { .. } => "singular_leading_coefficient",
            Error::InvalidWeights(_) => "invalid_weights",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Dimension(_) => "dimension_mismatch",
            Error::NonFinite => "non_finite",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::AlreadyMultiple { .. } => "already_multiple",
            Error::GammaAtOrigin => "gamma_at_origin",
            Error::Unbracketed { .. } => "maximum_not_bracketed",
            Error::BranchPairing { .. } => "branch_pairing_inconsistent",
            Error::NotCoalesced { .. } => "not_coalesced",
            Error::HigherCoalescence => "higher_coalescence",
            Error::DefiniteForm { .. } => "definite_form",
            Error::CorrectionFailed { .. } => "correction_failed",
            Error::Input { .. } => "input_error",
        }
    }

    /// True for errors caused by malformed or invalid input rather than by
    /// the numerical pipeline.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidPolynomial(_)
                | Error::SingularLeadingCoefficient { .. }
                | Error::InvalidWeights(_)
                | Error::InvalidArgument(_)
                | Error::Dimension(_)
                | Error::NonFinite
                | Error::Input { .. }
        )
    }

    pub(crate) fn input(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Input {
            field: field.into(),
            message: message.into(),
        }
    }
}
