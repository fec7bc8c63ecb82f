use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no target boundary point in direction {0}°")]
    NoBoundary(f64),

    #[error("dilation undefined for endpoint ({0}, {1})")]
    UndefinedDilation(i64, i64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error("parameter {0} is outside the open range of the law")]
    OutOfRange(f64),

    #[error("quadrature did not reach tolerance: estimate {estimate}, error {error:e}")]
    Accuracy { estimate: f64, error: f64 },

    #[error("unsupported region: {0}")]
    UnsupportedRegion(String),

    #[error("minimum of the objective sits on the edge of the p grid (p = {0})")]
    Bracket(f64),

    #[error("binning error: {0}")]
    Binning(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
