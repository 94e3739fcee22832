use thiserror::Error;

use crate::trace::IterationRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0}")]
    Diverged(Box<DivergenceReport>),

    #[error("degenerate iterate: operator maps the current vector to zero")]
    DegenerateIterate,

    #[error("gradient vanished before an eigenvalue estimate could be formed")]
    ConvergedBeforeEstimate,

    #[error("largest eigenvalue lambda1 is required; estimate it first (e.g. with the power method)")]
    MissingLambda1,

    #[error("operator is not symmetric (max |a_ij - a_ji| = {max_asymmetry:e})")]
    NonSymmetric { max_asymmetry: f64 },

    #[error("lambda1 inexact: gradient norm {residual:e} after two steps exceeds {tolerance:e}")]
    Lambda1Inexact { residual: f64, tolerance: f64 },

    #[error("eigenvalue estimate is zero; cannot form a reciprocal step")]
    ZeroEigenvalueEstimate,

    #[error("eigenvalue estimate did not stall within {iterations} iterations (last nu1 = {last_nu1})")]
    NoStall { iterations: usize, last_nu1: f64 },

    #[error("problem is not strongly convex (lambda_n = {lambda_n}); accelerated gradient requires lambda_n > 0")]
    NotStronglyConvex { lambda_n: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn diverged(report: DivergenceReport) -> Self {
        Error::Diverged(Box::new(report))
    }

    pub fn divergence(&self) -> Option<&DivergenceReport> {
        match self {
            Error::Diverged(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceReason {
    /// A NaN or infinity appeared in the iterate or gradient.
    NonFinite,
    /// `‖g‖` grew by at least `factor` relative to an earlier iterate.
    Growth { factor: f64 },
}

/// Structured report for a run that blew up. Carries the partial trace and
/// the last state whose entries were all finite.
#[derive(Debug, Clone)]
pub struct DivergenceReport {
    pub iteration: usize,
    pub reason: DivergenceReason,
    pub last_finite_x: Vec<f64>,
    pub trace: Vec<IterationRecord>,
}

impl std::fmt::Display for DivergenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.reason {
            DivergenceReason::NonFinite => {
                write!(f, "diverged at iteration {}: non-finite values", self.iteration)
            }
            DivergenceReason::Growth { factor } => write!(
                f,
                "diverged at iteration {}: gradient norm grew by a factor of {factor:.3e}",
                self.iteration
            ),
        }
    }
}
