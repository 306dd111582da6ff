use std::io;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("array parameters M={m} and N={n} are not coprime")]
    NonCoprime { m: usize, n: usize },
    #[error("number of basic coprime arrays L={0} must be even")]
    OddL(usize),
    #[error("antenna count Q={0} must be odd")]
    EvenQ(usize),
    #[error("array parameter `{0}` must be positive")]
    ZeroParameter(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid location: {0}")]
    InvalidLocation(String),
    #[error("grid axis `{0}` is empty or not strictly monotone")]
    EmptyGrid(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("least-squares system is singular even with ridge regularization")]
    SingularLeastSquares,
    #[error("grid too coarse: predicted lobe width {width:.3e} spans fewer than 4 cells of {cell:.3e}")]
    ResolutionTooCoarse { width: f64, cell: f64 },
    #[error("no peak found in the sampled pattern")]
    NoPeakFound,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O failure: {0}")]
    Io(#[from] io::Error),
    #[error("CSV failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON failure: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
