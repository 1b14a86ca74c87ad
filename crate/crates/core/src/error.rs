use thiserror::Error;

pub type Result<T, E = ThermoError> = std::result::Result<T, E>;

/// Errors raised by the toolkit.
///
/// Variants split into two families: input validation failures (bad
/// parameters, mismatched dimensions, violated constraints) and numerical
/// failures (integrator breakdown, lost branches). [`ThermoError::is_numerical`]
/// tells them apart, which is what the CLI uses to pick its exit status.
#[derive(Debug, Error)]
pub enum ThermoError {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{x} lies outside the domain ({lo}, {hi}) of {what}")]
    Domain {
        what: &'static str,
        x: f64,
        lo: f64,
        hi: f64,
    },

    #[error("reduction constraint violated: {constraint} (value {value}, tolerance {tol})")]
    ConstraintViolation {
        constraint: String,
        value: f64,
        tol: f64,
    },

    #[error("degenerate chord data: {0}")]
    Degenerate(String),

    #[error("difference front has identically vanishing derivative on the scan grid; every point is a chord")]
    DegenerateFamily,

    #[error("equilibrium branch lost at time node {node} (t = {t}): nearest root moved by {jump}")]
    BranchLost { node: usize, t: f64, jump: f64 },

    #[error("integration failure at t = {t}: step size {dt} underflowed")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl ThermoError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ThermoError::InvalidInput(msg.into())
    }

    /// True for failures of a numerical procedure on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            ThermoError::BranchLost { .. } | ThermoError::StepUnderflow { .. }
        )
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(ThermoError::DimensionMismatch {
            what,
            expected,
            got,
        });
    }
    Ok(())
}
