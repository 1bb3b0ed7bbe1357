use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {re} + {im}i lies outside |z| <= {limit}")]
    OutOfRange { re: f64, im: f64, limit: f64 },

    #[error("result overflows the floating point range at {re} + {im}i")]
    Overflow { re: f64, im: f64 },

    #[error("detectors {a} and {b} sit at the same point")]
    DegenerateGeometry { a: String, b: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("transition probability {value:e} is negative beyond rounding")]
    NegativeProbability { value: f64 },

    #[error("total excitation probability {total} >= 1; reduce the coupling or raise the gaps")]
    NonPerturbative { total: f64 },

    #[error("oracle failed to converge: {reason}")]
    OracleFailure { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
