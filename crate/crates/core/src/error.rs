use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The two sphere points are (numerically) antipodal, so the geodesic
    /// and the log map are not unique.
    #[error("geodesic undefined between antipodal points (theta = {theta})")]
    Antipodal { theta: f64 },

    #[error("tangent vector of norm {norm} lies outside the injectivity radius")]
    OutOfInjectivity { norm: f64 },

    #[error("numerical failure at iteration {iteration}: {message}")]
    NumericalFailure { iteration: usize, message: String },

    /// Failure while building slice `base` of the Gram tensor.
    #[error("gram entry (base curve {base}, curve {other}): {source}")]
    Gram {
        base: usize,
        other: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
