use alloc::string::String;
use core::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input contains NaN or infinity.
    NonFinite,
    /// Iterative kernel exhausted its iteration budget.
    NoConvergence,
    /// Vector/matrix dimensions do not agree.
    DimensionMismatch { expected: usize, got: usize },
    /// Multiplier index ranges do not match the system shape.
    IndexMismatch(String),
    /// A mode matrix is not Hurwitz.
    NonHurwitz { mode: usize, max_real_part: f64 },
    /// A fixed Lyapunov piece fails the positive-definiteness check.
    FamilyNotPD { mode: usize, piece: usize },
    /// Certificate shape does not match the system.
    ShapeMismatch(String),
    /// Operation only defined for planar (n = 2) systems.
    UnsupportedDimension { got: usize },
    /// Simulation horizon shorter than the dwell time.
    BadHorizon,
    /// Numerical breakdown inside the feasibility solver.
    SolverFailure(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite => write!(f, "input contains NaN or Inf"),
            Error::NoConvergence => write!(f, "iteration budget exhausted"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::IndexMismatch(s) => write!(f, "index mismatch: {s}"),
            Error::NonHurwitz { mode, max_real_part } => write!(
                f,
                "mode {mode} is not Hurwitz (max eigenvalue real part {max_real_part:.6e})"
            ),
            Error::FamilyNotPD { mode, piece } => {
                write!(f, "P[{mode}][{piece}] is not positive definite")
            }
            Error::ShapeMismatch(s) => write!(f, "shape mismatch: {s}"),
            Error::UnsupportedDimension { got } => {
                write!(f, "operation requires n = 2, got n = {got}")
            }
            Error::BadHorizon => write!(f, "horizon shorter than dwell time"),
            Error::SolverFailure(s) => write!(f, "solver failure: {s}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
