use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scenario or simulation parameter is out of its domain.
    Config(String),
    /// A scenario violates an LTE-U Forum ON/OFF duration limit.
    LteuLimit(String),
    /// A probability argument lies outside its admissible range.
    Domain(String),
    /// The fixed-point solver failed to meet its tolerance.
    NoConvergence { iterations: u32, residual: f64 },
    /// Model quantities that must be consistent are not (e.g. a success
    /// sequence probability that increases with k).
    Consistency(String),
    /// No duty cycle is admissible under the active limits.
    EmptyInterval,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::LteuLimit(msg) => write!(f, "LTE-U limit violated: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NoConvergence { iterations, residual } => write!(
                f,
                "fixed point did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::Consistency(msg) => write!(f, "model consistency error: {msg}"),
            Error::EmptyInterval => f.write_str("no admissible duty cycle under the active limits"),
        }
    }
}

impl core::error::Error for Error {}
