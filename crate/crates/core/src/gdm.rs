//! Gradient descent with heavy-ball momentum:
//! `x⁽ᵏ⁺¹⁾ = x⁽ᵏ⁾ − αg⁽ᵏ⁾ + β(x⁽ᵏ⁾ − x⁽ᵏ⁻¹⁾)`.
//!
//! Besides fixed steps this module runs the `2/λ₁` step after a single
//! `1/λ₁` "smart initialization" step, and spectral cycling, where one step of
//! size `1/λᵢ` per eigenvalue drives the gradient to zero in `n` steps.

use crate::config::{SolverConfig, SolverRun, Termination};
use crate::error::{DivergenceReason, DivergenceReport, Error, Result};
use crate::linops::{check_dim, eval_f_with_grad, MatvecCounter, QuadraticProblem};
use crate::trace::{IterationRecord, Phase};
use crate::vecops::{all_finite, norm, norm_sq};

/// Iterate pair and gradient pair of a momentum run. At `k = 0` the previous
/// iterate equals the current one.
#[derive(Debug, Clone, PartialEq)]
pub struct GdmState {
    pub x_prev: Vec<f64>,
    pub x: Vec<f64>,
    pub g_prev: Vec<f64>,
    pub g: Vec<f64>,
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl GdmState {
    /// Initial state at `x0`; costs one product.
    pub fn new(p: &QuadraticProblem, x0: &[f64], alpha: f64, beta: f64) -> Result<Self> {
        check_dim(p.dim(), x0.len())?;
        let mut mv = MatvecCounter::new();
        let g = mv.gradient(p, x0);
        Ok(Self::from_parts(x0.to_vec(), g, alpha, beta))
    }

    pub(crate) fn from_parts(x: Vec<f64>, g: Vec<f64>, alpha: f64, beta: f64) -> Self {
        Self { x_prev: x.clone(), x, g_prev: g.clone(), g, k: 0, alpha, beta }
    }

    /// `x − α_step·g + β(x − x_prev)`.
    pub(crate) fn next_x(&self, alpha: f64) -> Vec<f64> {
        self.x
            .iter()
            .zip(&self.x_prev)
            .zip(&self.g)
            .map(|((xi, xp), gi)| xi - alpha * gi + self.beta * (xi - xp))
            .collect()
    }

    pub(crate) fn advance(&mut self, x_next: Vec<f64>, g_next: Vec<f64>) {
        self.x_prev = std::mem::replace(&mut self.x, x_next);
        self.g_prev = std::mem::replace(&mut self.g, g_next);
        self.k += 1;
    }
}

/// One momentum step with the state's own `α`; one product for the new
/// gradient.
pub fn gdm_step(p: &QuadraticProblem, st: &GdmState) -> Result<GdmState> {
    check_dim(p.dim(), st.x.len())?;
    let x_next = st.next_x(st.alpha);
    let mut mv = MatvecCounter::new();
    let g_next = mv.gradient(p, &x_next);
    if !all_finite(&x_next) || !all_finite(&g_next) {
        return Err(Error::diverged(DivergenceReport {
            iteration: st.k + 1,
            reason: DivergenceReason::NonFinite,
            last_finite_x: st.x.clone(),
            trace: Vec::new(),
        }));
    }
    let mut next = st.clone();
    next.advance(x_next, g_next);
    Ok(next)
}

/// Step-size rule for [`run_gdm`].
#[derive(Debug, Clone, PartialEq)]
pub enum StepSchedule {
    Fixed(f64),
    /// `α = 2/λ₁` on every step; needs the problem's `λ₁`.
    TwoOverLambda1,
    /// Steps `1/λ` for the listed eigenvalues, largest first, repeated
    /// cyclically. Build with [`StepSchedule::spectral_cycle`].
    SpectralCycle(Vec<f64>),
}

impl StepSchedule {
    /// Sorts the eigenvalues into descending order; rejects empty lists and
    /// zero or non-finite entries.
    pub fn spectral_cycle(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::invalid("spectral cycle needs at least one eigenvalue"));
        }
        if eigenvalues.iter().any(|&l| l == 0.0 || !l.is_finite()) {
            return Err(Error::invalid("spectral cycle eigenvalues must be finite and nonzero"));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Ok(StepSchedule::SpectralCycle(eigenvalues))
    }

    fn resolve(&self, p: &QuadraticProblem) -> Result<Vec<f64>> {
        match self {
            StepSchedule::Fixed(a) if *a > 0.0 && a.is_finite() => Ok(vec![*a]),
            StepSchedule::Fixed(a) => Err(Error::invalid(format!("step size must be positive, got {a}"))),
            StepSchedule::TwoOverLambda1 => Ok(vec![2.0 / p.require_lambda1()?]),
            StepSchedule::SpectralCycle(l) => {
                if l.is_empty() || l.iter().any(|&v| v == 0.0 || !v.is_finite()) {
                    return Err(Error::invalid("spectral cycle eigenvalues must be finite and nonzero"));
                }
                Ok(l.iter().map(|v| 1.0 / v).collect())
            }
        }
    }
}

/// Watches `‖g‖` for runaway growth: trips once `‖g‖ ≥ factor·min‖g‖` over
/// the run so far.
#[derive(Debug, Clone)]
pub(crate) struct GrowthMonitor {
    factor: f64,
    min: f64,
}

impl GrowthMonitor {
    pub(crate) fn new(factor: f64, g0_norm: f64) -> Self {
        Self { factor, min: g0_norm }
    }

    pub(crate) fn observe(&mut self, gnorm: f64) -> Option<f64> {
        if self.min > 0.0 && gnorm >= self.factor * self.min {
            return Some(gnorm / self.min);
        }
        self.min = self.min.min(gnorm);
        None
    }
}

pub(crate) fn start_record(p: &QuadraticProblem, x: &[f64], g: &[f64], matvecs: u64) -> IterationRecord {
    IterationRecord::new(0, eval_f_with_grad(p, x, g), norm_sq(g), 0.0, Phase::Start, matvecs)
}

pub(crate) fn non_finite(k: usize, last_x: &[f64], trace: &[IterationRecord]) -> Error {
    Error::diverged(DivergenceReport {
        iteration: k,
        reason: DivergenceReason::NonFinite,
        last_finite_x: last_x.to_vec(),
        trace: trace.to_vec(),
    })
}

pub(crate) fn grew(k: usize, factor: f64, last_x: &[f64], trace: &[IterationRecord]) -> Error {
    Error::diverged(DivergenceReport {
        iteration: k,
        reason: DivergenceReason::Growth { factor },
        last_finite_x: last_x.to_vec(),
        trace: trace.to_vec(),
    })
}

/// Gradient-norm and objective-floor stopping rules shared by the solvers.
pub(crate) fn stop_reason(gnorm: f64, g_tol: f64, f: f64, f_floor: f64) -> Option<Termination> {
    if gnorm == 0.0 {
        Some(Termination::Stationary)
    } else if gnorm <= g_tol {
        Some(Termination::GradientTolerance)
    } else if f <= f_floor {
        Some(Termination::Unbounded)
    } else {
        None
    }
}

/// Runs momentum descent with the given schedule; `cfg.alpha` is ignored in
/// favour of the schedule. Emits a start record (`k = 0`) and one record per
/// step. `observe` sees every state, the initial one included.
pub fn run_gdm_with<F>(
    p: &QuadraticProblem,
    x0: &[f64],
    cfg: &SolverConfig,
    schedule: &StepSchedule,
    mut observe: F,
) -> Result<SolverRun>
where
    F: FnMut(&GdmState),
{
    cfg.validate_momentum()?;
    check_dim(p.dim(), x0.len())?;
    let steps = schedule.resolve(p)?;
    let mut mv = MatvecCounter::new();
    let g0 = mv.gradient(p, x0);
    let mut st = GdmState::from_parts(x0.to_vec(), g0, steps[0], cfg.beta);
    let g_tol = cfg.resolved_g_tol(norm(&st.g));
    let mut trace = vec![start_record(p, &st.x, &st.g, mv.count())];
    observe(&st);

    let f0 = trace[0].f;
    let mut termination = stop_reason(norm(&st.g), g_tol, f0, cfg.f_floor).unwrap_or(Termination::MaxIterations);
    if termination == Termination::MaxIterations {
        for k in 0..cfg.max_iter {
            let alpha = steps[k % steps.len()];
            st.alpha = alpha;
            let x_next = st.next_x(alpha);
            let g_next = mv.gradient(p, &x_next);
            if !all_finite(&x_next) || !all_finite(&g_next) {
                return Err(non_finite(k + 1, &st.x, &trace));
            }
            st.advance(x_next, g_next);
            observe(&st);
            let f = eval_f_with_grad(p, &st.x, &st.g);
            let gnorm = norm(&st.g);
            trace.push(IterationRecord::new(st.k, f, gnorm * gnorm, alpha, Phase::Inner, mv.count()));
            if let Some(t) = stop_reason(gnorm, g_tol, f, cfg.f_floor) {
                termination = t;
                break;
            }
        }
    }
    Ok(SolverRun { trace, x: st.x, g: st.g, termination, matvecs: mv.count() })
}

pub fn run_gdm(p: &QuadraticProblem, x0: &[f64], cfg: &SolverConfig, schedule: &StepSchedule) -> Result<SolverRun> {
    run_gdm_with(p, x0, cfg, schedule, |_| {})
}

/// `x⁽⁰⁾ = x⁽⁻¹⁾ − (1/λ₁)(Ax⁽⁻¹⁾ − b)`: one step that removes the
/// `λ₁`-eigenvector component from the gradient.
pub fn smart_init(p: &QuadraticProblem, x_minus1: &[f64]) -> Result<Vec<f64>> {
    let l1 = p.require_lambda1()?;
    check_dim(p.dim(), x_minus1.len())?;
    let mut mv = MatvecCounter::new();
    let g = mv.gradient(p, x_minus1);
    Ok(x_minus1.iter().zip(&g).map(|(x, gi)| x - gi / l1).collect())
}

/// Smart initialization followed by fixed steps `α = 2/λ₁` (momentum
/// `cfg.beta`, restarted after the initial step).
///
/// The trace starts at `x⁽⁻¹⁾` (`k = 0`), records the initialization step as
/// `smart-init` and the rest as `inner`. Negative eigenvalues make the
/// corresponding gradient components grow by `|1 − 2λⱼ/λ₁|` per step; that
/// is reported as a divergence (growth by `cfg.div_factor` over the smallest
/// gradient norm seen) rather than as an unbounded objective.
pub fn two_over_lambda1_run(p: &QuadraticProblem, x_minus1: &[f64], cfg: &SolverConfig) -> Result<SolverRun> {
    cfg.validate_momentum()?;
    let l1 = p.require_lambda1()?;
    check_dim(p.dim(), x_minus1.len())?;
    let mut mv = MatvecCounter::new();
    let gm1 = mv.gradient(p, x_minus1);
    let g_tol = cfg.resolved_g_tol(norm(&gm1));
    let mut trace = vec![start_record(p, x_minus1, &gm1, mv.count())];
    if let Some(t) = stop_reason(norm(&gm1), g_tol, trace[0].f, f64::NEG_INFINITY) {
        return Ok(SolverRun { trace, x: x_minus1.to_vec(), g: gm1, termination: t, matvecs: mv.count() });
    }

    let x0: Vec<f64> = x_minus1.iter().zip(&gm1).map(|(x, gi)| x - gi / l1).collect();
    let g0 = mv.gradient(p, &x0);
    if !all_finite(&g0) {
        return Err(non_finite(1, x_minus1, &trace));
    }
    let gnorm = norm(&g0);
    trace.push(IterationRecord::new(1, eval_f_with_grad(p, &x0, &g0), gnorm * gnorm, 1.0 / l1, Phase::SmartInit, mv.count()));
    let mut monitor = GrowthMonitor::new(cfg.div_factor, norm(&gm1));
    let mut st = GdmState::from_parts(x0, g0, 2.0 / l1, cfg.beta);
    st.k = 1;
    if let Some(t) = stop_reason(gnorm, g_tol, f64::INFINITY, f64::NEG_INFINITY) {
        return Ok(SolverRun { trace, x: st.x, g: st.g, termination: t, matvecs: mv.count() });
    }
    monitor.observe(gnorm);

    let mut termination = Termination::MaxIterations;
    for _ in 1..cfg.max_iter {
        let x_next = st.next_x(st.alpha);
        let g_next = mv.gradient(p, &x_next);
        if !all_finite(&x_next) || !all_finite(&g_next) {
            return Err(non_finite(st.k + 1, &st.x, &trace));
        }
        st.advance(x_next, g_next);
        let gnorm = norm(&st.g);
        let f = eval_f_with_grad(p, &st.x, &st.g);
        trace.push(IterationRecord::new(st.k, f, gnorm * gnorm, st.alpha, Phase::Inner, mv.count()));
        if let Some(factor) = monitor.observe(gnorm) {
            return Err(grew(st.k, factor, &st.x, &trace));
        }
        if let Some(t) = stop_reason(gnorm, g_tol, f, cfg.f_floor) {
            termination = t;
            break;
        }
    }
    Ok(SolverRun { trace, x: st.x, g: st.g, termination, matvecs: mv.count() })
}
