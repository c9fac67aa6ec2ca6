use std::path::PathBuf;

/// Errors produced anywhere in the estimation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("not a THSQ file: {0}")]
    Format(String),

    #[error("corrupt sequence: {0}")]
    Corrupt(String),

    #[error("invalid header: {0}")]
    InvalidHeader(String),

    #[error("invalid synthetic spec: {0}")]
    Spec(String),

    #[error("tracker init failed: {0}")]
    Init(String),

    #[error("out of bounds: {0}")]
    Bounds(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("series too short: need at least {required} samples, got {actual}")]
    Length { required: usize, actual: usize },

    #[error("band error: {0}")]
    Band(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("buffer not ready: {filled} of {capacity} samples")]
    NotReady { filled: usize, capacity: usize },

    #[error("no spectrum bin falls inside [{lo}, {hi}] Hz (bin width {bin_width} Hz)")]
    BandResolution { lo: f64, hi: f64, bin_width: f64 },

    #[error("data error: {0}")]
    Data(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
