use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidInput(String),
    /// Evaluation point closer than `distance` to a pole of the symbol.
    NearPole { re: f64, im: f64, distance: f64 },
    /// Spectral parameter at or above the essential-spectrum threshold.
    AboveThreshold { omega: f64, threshold: f64 },
    Quadrature { achieved: f64, requested: f64 },
    NoBoundState(String),
    /// Second eigenvalue not positive at the root.
    Degenerate { mu2: f64 },
    NotPositiveDefinite,
    NoConvergence { iterations: usize, residual: f64 },
    Geometry(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(s) => write!(f, "invalid input: {s}"),
            Error::NearPole { re, im, distance } => {
                write!(f, "near-pole evaluation at {re}{im:+}i (distance {distance:e})")
            }
            Error::AboveThreshold { omega, threshold } => {
                write!(f, "omega = {omega} is not below the threshold {threshold}")
            }
            Error::Quadrature { achieved, requested } => {
                write!(f, "quadrature reached {achieved:e}, requested {requested:e}")
            }
            Error::NoBoundState(s) => write!(f, "no-bound-state bracket: {s}"),
            Error::Degenerate { mu2 } => write!(f, "degenerate root: mu2 = {mu2}"),
            Error::NotPositiveDefinite => write!(f, "matrix not positive definite"),
            Error::NoConvergence { iterations, residual } => {
                write!(f, "no convergence after {iterations} iterations (residual {residual:e})")
            }
            Error::Geometry(s) => write!(f, "geometry: {s}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
