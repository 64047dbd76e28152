//! Error type shared across the crate.

use crate::racs::Axis;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, got {got:?} ({context})")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
        context: &'static str,
    },

    /// Singular value routines are restricted to small matrices.
    #[error("min(m, n) = {min_dim} exceeds the small-matrix limit {limit}")]
    DimensionTooLarge { min_dim: usize, limit: usize },

    /// A row or column with zero norm was hit inside the alternating
    /// normalization loop, where no passthrough convention applies.
    #[error("zero {axis:?} line at index {index} in normalization pass {step}")]
    ZeroLineEncountered { step: usize, axis: Axis, index: usize },

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("matrix is identically zero")]
    ZeroMatrix,

    #[error("zero row at index {index}")]
    ZeroRow { index: usize },

    /// A momentum row vanished during a run whose hypotheses exclude it.
    #[error("momentum row {row} vanished at iteration {iter}; run aborted")]
    ZeroRowAbort { iter: usize, row: usize },

    #[error("gradient (or momentum average) is zero; normalized direction undefined")]
    ZeroGradient,

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("in parameter group '{name}': {source}")]
    Group {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(
        expected: (usize, usize),
        got: (usize, usize),
        context: &'static str,
    ) -> Self {
        Error::ShapeMismatch {
            expected,
            got,
            context,
        }
    }

    /// Wrap an error with the parameter-group name it occurred in.
    pub fn in_group(self, name: &str) -> Self {
        Error::Group {
            name: name.to_string(),
            source: Box::new(self),
        }
    }
}
