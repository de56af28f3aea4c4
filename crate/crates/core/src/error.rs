use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("measure has no points")]
    EmptyMeasure,
    #[error("non-finite value in input: {0}")]
    NonFinite(String),
    #[error("points {0} and {1} coincide within tolerance")]
    DuplicatePoint(f64, f64),
    #[error("negative v weight {v} at x = {x}")]
    NegativeVee { x: f64, v: f64 },
    #[error("point x = {0} carries no mass (|w| + v is zero)")]
    NullPoint(f64),
    #[error("adjacent points {0} and {1} are too close for the gap formulas")]
    NearCollision(f64, f64),

    #[error("iteration did not converge: {0}")]
    NonConverged(String),
    #[error("polynomial declared real-rooted has {found} real roots for degree {degree}")]
    ComplexRootDetected { degree: usize, found: usize },
    #[error("function is not Herglotz-Nevanlinna: {0}")]
    NotHerglotz(String),
    #[error("numerator and denominator share the root {0}")]
    CommonRoots(f64),
    #[error("residue at z = 0 is {0}, expected -1/2")]
    BadResidueAtZero(f64),
    #[error("continued fraction produced non-positive length {0}")]
    NonPositiveLength(f64),
    #[error("degree structure mismatch: {0}")]
    DegreeMismatch(String),
    #[error("evaluation hit a pole at z = {0}")]
    PoleHit(f64),
    #[error("cumulative length {0} reaches the budget of 2")]
    LengthBudgetExceeded(f64),
    #[error("norming constant routes disagree for eigenvalue {lambda}: {detail}")]
    ConsistencyFail { lambda: f64, detail: String },
    #[error("no reconstruction consistent with the data: {0}")]
    Infeasible(String),
    #[error("pole {0} matches no splitting rule")]
    UnresolvedPole(f64),
    #[error("branch {branch} failed to reconstruct: {reason}")]
    ReconstructionFail { branch: usize, reason: String },
    #[error("trace formula and kernel sum disagree by {0:e}")]
    TraceMismatch(f64),
    #[error("interior data has {0} eigenvalues; enumeration is capped at 24")]
    EnumerationCap(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numerical,
    Infeasible,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            EmptyMeasure | NonFinite(_) | DuplicatePoint(..) | NegativeVee { .. } | NullPoint(_)
            | InvalidArgument(_) | EnumerationCap(_) => ErrorClass::Validation,
            Infeasible(_) | UnresolvedPole(_) => ErrorClass::Infeasible,
            _ => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
