//! Matrix-free quadratic optimization built on the equivalence between
//! fixed-step gradient descent and the power method.
//!
//! For `f(x) = ½xᵀAx − bᵀx` with symmetric `A`, the gradients of gradient
//! descent with step `α` and momentum `β` obey
//! `g⁽ᵏ⁺¹⁾ = Ĥg⁽ᵏ⁾ − βg⁽ᵏ⁻¹⁾` with `Ĥ = (1+β)I − αA`, so every run is also a
//! power iteration on `Ĥ`. The solvers in this crate exploit that to recover
//! the leftmost eigen-pair of `A` for the price of two inner products per
//! iteration, and use it to pick longer steps.
//!
//! Module map:
//! - [`linops`]: operators, objective and gradient, the shifted operator `Ĥ`.
//! - [`eig`]: cyclic Jacobi eigensolver used as an independent oracle.
//! - [`gdm`]: gradient descent with momentum and step schedules.
//! - [`pmm`]: power method with momentum.
//! - [`gdeig`]: gradient descent with per-iteration eigenvalue estimates.
//! - [`kick`]: fixed steps interleaved with long eigenvalue-based steps.
//! - [`planar`]: the two-step exact solver for 2×2 problems.
//! - [`examples`]: closed-form saddle-point examples.
//! - [`probgen`]: seeded problems with prescribed spectra.
//! - [`baselines`]: exact-step steepest descent and accelerated gradient.
//! - [`trace`]: per-iteration records and CSV I/O.
//! - [`mmio`]: Matrix Market and plain-text vector files.

// NaN has to fail the `!(x > 0.0)` style checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod config;
pub mod eig;
mod error;
pub mod examples;
pub mod gdeig;
pub mod gdm;
pub mod kick;
pub mod linops;
pub mod mmio;
pub mod planar;
pub mod pmm;
pub mod probgen;
pub mod trace;
pub mod vecops;

pub use config::{SolverConfig, SolverRun, Termination};
pub use error::{DivergenceReason, DivergenceReport, Error, Result};
pub use linops::{DenseMatrix, LinearOperator, QuadraticProblem, ShiftedOperator, SymmetricOperator};
pub use trace::{IterationRecord, Phase};
