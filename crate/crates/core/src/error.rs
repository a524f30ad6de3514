use num_complex::Complex64;
use thiserror::Error;

/// Every failure the toolkit can report.
///
/// Variants are grouped by the layer that raises them; callers that only care
/// about "numeric trouble vs. bad input" can use [`Error::is_numeric`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("numeric failure: {what} (best residual {best_residual:e})")]
    NumericFailure { what: String, best_residual: f64 },

    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    #[error("ambiguous pole near {point}: two stored poles within tolerance")]
    AmbiguousPole { point: Complex64 },

    #[error("path passes within {distance:e} of the singular point {point} (margin {margin:e})")]
    PathThroughPole {
        point: Complex64,
        distance: f64,
        margin: f64,
    },

    #[error("quadrature cross-check failed: residues give {by_residues}, quadrature gives {by_quadrature}")]
    CrossCheck {
        by_residues: Complex64,
        by_quadrature: Complex64,
    },

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("invalid Weierstrass data: {0}")]
    InvalidWeierstrassData(String),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("point {v} lies outside the gluing annulus [{inner:e}, {outer:e}]")]
    OutOfGluingRegion { v: Complex64, inner: f64, outer: f64 },

    #[error("height {height} is within {distance:e} of the critical value {critical}")]
    CriticalLevel {
        height: f64,
        critical: f64,
        distance: f64,
    },

    #[error("zero labeling ambiguity: {0}")]
    LabelingAmbiguity(String),

    #[error("zero tracking failure: {0}")]
    TrackingFailure(String),

    #[error("finite-difference Jacobian is noisy: {0}")]
    NoisyJacobian(String),

    #[error("embeddedness condition violated: need m - 1 > {ratio}, smallest admissible m is {min_admissible}")]
    EmbeddednessCondition { ratio: f64, min_admissible: u64 },

    #[error("invalid schedule at index {index}: {reason}")]
    InvalidSchedule { index: usize, reason: String },

    #[error("invalid sigma action: {0}")]
    InvalidAction(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// True for failures caused by floating-point behaviour rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NumericFailure { .. }
                | Error::IllConditioned(_)
                | Error::CrossCheck { .. }
                | Error::NoisyJacobian(_)
                | Error::TrackingFailure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
