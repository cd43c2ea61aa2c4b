//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A numeric argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The function lacks the metadata a computation path requires
    /// (bound certificate, eventual-constant index or growth envelope).
    #[error("unsupported function: {0}")]
    UnsupportedFunction(String),

    /// Declared function metadata is contradicted by an evaluated point.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A rate selection does not match the window it is applied to.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The Euler step exceeds the validity threshold dt * 2 * upper_rate <= 2.
    /// The step is refused, never clamped.
    #[error("step too large: dt = {dt} violates dt * {norm} <= 2")]
    StepTooLarge { dt: f64, norm: f64 },

    /// The requested tolerance needs more grid steps than the cap allows.
    #[error(
        "tolerance too tight: {requested} steps exceed the cap of {cap}; \
         achievable tolerance at the cap is {achievable:e}"
    )]
    ToleranceTooTight {
        requested: u128,
        cap: u64,
        achievable: f64,
    },

    /// A brute-force verification request exceeds the enumeration budget.
    #[error("oracle budget exceeded: {0}")]
    OracleBudget(String),

    /// An input file could not be read or parsed.
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
