use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An index (level, transition, channel) is out of range.
    #[error("index {index} out of range for {what} (limit {limit})")]
    Index {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    /// A structural invariant of an input value does not hold.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("quadrature did not converge: estimated error {achieved:e} > requested {requested:e} after {subdivisions} subdivisions")]
    Quadrature {
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular feedback loop: |1 - S[{output},{input}]| = {magnitude:e}")]
    SingularLoop {
        output: usize,
        input: usize,
        magnitude: f64,
    },

    #[error("triplet is not of rate/shift form: {0}")]
    Shape(String),

    #[error("integrator step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("generator kernel has dimension {nullity}; stationary state is not unique")]
    DegenerateKernel { nullity: usize },

    #[error("at grid point {index} (omega = {omega}): {source}")]
    AtGridPoint {
        index: usize,
        omega: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Index { .. } => "index",
            Error::Invalid { .. } => "invalid",
            Error::Quadrature { .. } => "quadrature",
            Error::Dimension(_) => "dimension",
            Error::SingularLoop { .. } => "singular_loop",
            Error::Shape(_) => "shape",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::DegenerateKernel { .. } => "degenerate_kernel",
            Error::AtGridPoint { .. } => "grid_point",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::Unsupported(_) => "unsupported",
        }
    }
}
