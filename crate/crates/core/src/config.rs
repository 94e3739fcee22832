//! Solver settings and the common result of a solver run.

use crate::trace::IterationRecord;

/// Step size, momentum, stopping rules and diagnostics shared by the solvers.
///
/// Defaults: `g_tol = 1e-8·max(1, ‖g⁽⁰⁾‖)`, `f_floor = -1e12`, a divergence
/// window of 20 iterations with growth factor `1e6`, resynchronisation of the
/// recurrence gradient every 50 iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub alpha: f64,
    pub beta: f64,
    pub max_iter: usize,
    /// Absolute gradient-norm tolerance; `None` means `1e-8·max(1, ‖g⁽⁰⁾‖)`.
    pub g_tol: Option<f64>,
    /// Runs stop and are labelled unbounded once `f ≤ f_floor`.
    pub f_floor: f64,
    pub div_factor: f64,
    pub div_window: usize,
    /// Stop once the relative eigen-residual `δ/‖g‖` falls to this value.
    pub eig_tol: Option<f64>,
    /// Compute the eigen-residual `δ` each iteration (one extra product at start).
    pub compute_delta: bool,
    /// Recompute `g = Ax − b` directly every this many iterations (0 disables).
    pub resync_every: usize,
    /// Classification tolerance; `None` means `1e-8·(1+β)`.
    pub tol_class: Option<f64>,
    /// Step length used by exact-step descent along negative-curvature rays;
    /// `None` means `10/λ₁` (or 10 without `λ₁`).
    pub neg_curvature_step: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            max_iter: 1000,
            g_tol: None,
            f_floor: -1e12,
            div_factor: 1e6,
            div_window: 20,
            eig_tol: None,
            compute_delta: false,
            resync_every: 50,
            tol_class: None,
            neg_curvature_step: None,
        }
    }
}

impl SolverConfig {
    pub fn with_step(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta, ..Self::default() }
    }

    pub fn max_iter(mut self, n: usize) -> Self {
        self.max_iter = n;
        self
    }

    pub fn g_tol(mut self, tol: f64) -> Self {
        self.g_tol = Some(tol);
        self
    }

    pub fn f_floor(mut self, floor: f64) -> Self {
        self.f_floor = floor;
        self
    }

    pub fn with_delta(mut self) -> Self {
        self.compute_delta = true;
        self
    }

    pub fn eig_tol(mut self, tol: f64) -> Self {
        self.eig_tol = Some(tol);
        self
    }

    pub fn resolved_g_tol(&self, g0_norm: f64) -> f64 {
        self.g_tol.unwrap_or(1e-8 * g0_norm.max(1.0))
    }

    pub fn resolved_tol_class(&self) -> f64 {
        self.tol_class.unwrap_or(1e-8 * (1.0 + self.beta))
    }

    pub(crate) fn validate_momentum(&self) -> crate::Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(crate::Error::invalid(format!("momentum must lie in [0, 1], got {}", self.beta)));
        }
        if self.max_iter == 0 {
            return Err(crate::Error::invalid("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `‖g‖ ≤ g_tol`.
    GradientTolerance,
    /// `f ≤ f_floor`: the quadratic is unbounded below along the iterates.
    Unbounded,
    /// Relative eigen-residual reached `eig_tol`.
    EigenTolerance,
    /// Gradient was exactly zero.
    Stationary,
    MaxIterations,
}

impl Termination {
    pub fn label(self) -> &'static str {
        match self {
            Termination::GradientTolerance => "converged",
            Termination::Unbounded => "unbounded",
            Termination::EigenTolerance => "eigen-converged",
            Termination::Stationary => "stationary",
            Termination::MaxIterations => "max-iterations",
        }
    }
}

/// Trace plus final iterate of a finished run.
#[derive(Debug, Clone)]
pub struct SolverRun {
    pub trace: Vec<IterationRecord>,
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub termination: Termination,
    pub matvecs: u64,
}

impl SolverRun {
    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.k)
    }

    pub fn final_f(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.f)
    }

    /// First iteration whose objective is at most `target`.
    pub fn first_k_with_f_below(&self, target: f64) -> Option<usize> {
        self.trace.iter().find(|r| r.f <= target).map(|r| r.k)
    }
}
