use alloc::string::String;

/// Errors and explicit signals raised by the core algorithms.
///
/// Over-cap and budget conditions are reported as values so callers can tell
/// "no answer exists" apart from "gave up".
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("image list is not a bijection on 0..{degree}")]
    NotAPermutation { degree: usize },
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("group order exceeds the enumeration cap of {cap} elements")]
    OverCap { cap: usize },
    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("group is not transitive")]
    NotTransitive,
    #[error("group is not a regular abelian group")]
    NotRegularAbelian,
    #[error("unsupported group shape: {0}")]
    UnsupportedShape(String),
    #[error("invalid connection set: {0}")]
    InvalidConnectionSet(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
