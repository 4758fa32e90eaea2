use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("derivative order {order} exceeds jet degree {degree}")]
    OrderExceeded { order: usize, degree: usize },

    #[error("jets have different basepoints or degrees")]
    BasepointMismatch,

    #[error("invalid smoothness s = {0}; expected a finite s > 0")]
    InvalidSmoothness(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("duplicate point {0:?}")]
    DuplicatePoint(Vec<f64>),

    #[error("empty point set")]
    EmptySet,

    #[error("not a nonnegative field: value {value} at {point:?}")]
    NotNonnegative { point: Vec<f64>, value: f64 },

    #[error("jet at {point:?} is not flat: order-{order} derivative is nonzero where the value vanishes")]
    NotFlat { point: Vec<f64>, order: usize },

    #[error("infinite field norm: pair {first:?} / {second:?} is not separated")]
    InfiniteNorm { first: Vec<f64>, second: Vec<f64> },

    #[error("power jet undefined at non-flat zero")]
    PowerJetUndefined,

    #[error("refinement limit: cubes would need level > {max_level}")]
    RefinementLimit { max_level: u32 },

    #[error("point {0:?} is outside the covered region")]
    Uncovered(Vec<f64>),

    #[error("budget exhausted without bracketing; last bracket [{lo}, {hi}]")]
    BudgetExhausted { lo: f64, hi: f64 },

    #[error("infeasible generation after {0} rejections")]
    GenerationFailed(usize),

    #[error("{count} points exceed the exhaustive subset limit of {max}; scan a random sample of at most {max} points instead")]
    TooManyPoints { count: usize, max: usize },

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures of a numerical procedure (as opposed to bad input data).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::BudgetExhausted { .. }
                | Error::GenerationFailed(_)
                | Error::RefinementLimit { .. }
                | Error::PowerJetUndefined
        )
    }
}
