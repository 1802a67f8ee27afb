use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mesh invariant violated: {0}")]
    InvalidMesh(String),

    #[error("failed to parse {what}: {reason}")]
    Parse { what: String, reason: String },

    #[error("non-positive coefficient a(x) = {value:e} at ({x}, {y})")]
    NonPositiveCoefficient { value: f64, x: f64, y: f64 },

    #[error("singular local block on cell {cell}")]
    SingularLocal { cell: usize },

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("schemes are not comparable: {0}")]
    Incomparable(String),

    #[error("mesh level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
