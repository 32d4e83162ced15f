//! Crate-level error with the process exit-code contract:
//! 2 for invalid input, 3 for numeric failure.

use thiserror::Error;

use crate::bounds::BoundsError;
use crate::estimators::EstimatorError;
use crate::geometry::GeometryError;
use crate::mapfile::MapFileError;
use crate::montecarlo::McError;
use crate::specfun::NumericError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Validation(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub const EXIT_VALIDATION: i32 = 2;
    pub const EXIT_NUMERIC: i32 = 3;

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => Self::EXIT_NUMERIC,
            Error::Validation(_) | Error::Io(_) => Self::EXIT_VALIDATION,
        }
    }
}

fn numeric_is_failure(e: &NumericError) -> bool {
    matches!(e, NumericError::QuadratureNoConvergence { .. } | NumericError::NonFinite)
}

impl From<NumericError> for Error {
    fn from(e: NumericError) -> Self {
        if numeric_is_failure(&e) {
            Error::Numeric(e.to_string())
        } else {
            Error::Validation(e.to_string())
        }
    }
}

impl From<BoundsError> for Error {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Numeric(n) => n.into(),
            other => Error::Validation(other.to_string()),
        }
    }
}

impl From<GeometryError> for Error {
    fn from(e: GeometryError) -> Self {
        Error::Validation(e.to_string())
    }
}

impl From<EstimatorError> for Error {
    fn from(e: EstimatorError) -> Self {
        Error::Validation(e.to_string())
    }
}

impl From<MapFileError> for Error {
    fn from(e: MapFileError) -> Self {
        Error::Validation(e.to_string())
    }
}

impl From<McError> for Error {
    fn from(e: McError) -> Self {
        match e {
            McError::Bounds(b) => b.into(),
            other => Error::Validation(other.to_string()),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let quad: Error = BoundsError::Numeric(NumericError::QuadratureNoConvergence { a: 0.0, b: 1.0 }).into();
        assert_eq!(quad.exit_code(), 3);
        let sigma: Error = BoundsError::NonpositiveSigma(0.0).into();
        assert_eq!(sigma.exit_code(), 2);
        let mc: Error = McError::NoRuns.into();
        assert_eq!(mc.exit_code(), 2);
    }
}
