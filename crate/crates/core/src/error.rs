use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(
        "boundary guard violated: domain width {width} < 10*sqrt(t_end) = {required} \
         (pass --override-boundary-guard to proceed anyway)"
    )]
    BoundaryGuard { width: f64, required: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} is not an integer multiple of dt = {dt}")]
    NotGridMultiple { what: &'static str, value: f64, dt: f64 },

    #[error("{0} is outside the available range")]
    OutOfRange(String),

    #[error("non-finite value in field at step {step}, index {index}")]
    NonFinite { step: usize, index: usize },

    #[error("non-positive value {value} at index {index}")]
    NonPositive { index: usize, value: f64 },

    #[error("incompatible initial datum: {0}")]
    Incompatible(String),

    #[error("exp(f) overflows at x = {x}")]
    Overflow { x: f64 },

    #[error("expression error: {0}")]
    Expr(String),

    #[error("covariance matrix is not numerically positive definite")]
    NotPositiveDefinite,

    #[error("circulant embedding has a negative eigenvalue {0}")]
    NegativeEigenvalue(f64),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("configuration errors:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed container: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Checks that `value` is an integer multiple of `dt` and returns the multiple.
pub(crate) fn steps_of(what: &'static str, value: f64, dt: f64) -> Result<usize> {
    let ratio = value / dt;
    let rounded = ratio.round();
    if !(ratio.is_finite()) || rounded < 0.0 || (ratio - rounded).abs() > 1e-6 * rounded.max(1.0) {
        return Err(Error::NotGridMultiple { what, value, dt });
    }
    Ok(rounded as usize)
}
