//! Fixed-step momentum descent interrupted every `s` steps by a "kick": a
//! step of length `|1/λₙ|` built from the eigenvalue estimate of the inner
//! loop, kept only when it beats the ordinary step on the objective.

use crate::config::{SolverConfig, SolverRun, Termination};
use crate::error::{Error, Result};
use crate::gdm::{grew, non_finite, start_record, stop_reason, GdmState, GrowthMonitor};
use crate::gdeig::rayleigh_nu;
use crate::linops::{check_dim, eval_f_with_grad, MatvecCounter, QuadraticProblem};
use crate::trace::{IterationRecord, Phase};
use crate::vecops::{all_finite, dot, norm, norm_sq};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KickMode {
    /// Step `|1/λₙ|`: moves downhill along negative curvature.
    EscapeSaddle,
    /// Step `1/λₙ` with its sign: heads for the stationary point.
    TowardStationary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KickConfig {
    /// Inner steps before each kick attempt.
    pub s: usize,
    pub mode: KickMode,
    /// Inner steps of size `2/λ₁` instead of `cfg.alpha`.
    pub use_two_over_lambda1: bool,
    /// With `use_two_over_lambda1`, make the first inner step of each outer
    /// loop `1/λ₁`. Turning this off breaks the scheme; it exists for tests.
    pub first_step_one_over_lambda1: bool,
}

impl KickConfig {
    pub fn new(s: usize) -> Self {
        Self { s, mode: KickMode::EscapeSaddle, use_two_over_lambda1: false, first_step_one_over_lambda1: true }
    }

    pub fn mode(mut self, mode: KickMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn two_over_lambda1(mut self) -> Self {
        self.use_two_over_lambda1 = true;
        self
    }
}

/// `(x̃, x̂) = (x − t·g, x − αg)` with `t = |1/λ|` or `1/λ` by mode.
pub fn choose_kick_candidates(
    x: &[f64],
    g: &[f64],
    alpha: f64,
    lambda_n_est: f64,
    mode: KickMode,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dim(x.len(), g.len())?;
    let t = kick_length(lambda_n_est, mode)?;
    let tilde = x.iter().zip(g).map(|(xi, gi)| xi - t * gi).collect();
    let hat = x.iter().zip(g).map(|(xi, gi)| xi - alpha * gi).collect();
    Ok((tilde, hat))
}

fn kick_length(lambda: f64, mode: KickMode) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::ZeroEigenvalueEstimate);
    }
    Ok(match mode {
        KickMode::EscapeSaddle => (1.0 / lambda).abs(),
        KickMode::TowardStationary => 1.0 / lambda,
    })
}

/// Runs the kicked iteration. One trace record per inner step and one per
/// kick (phase `kick-accepted`/`kick-rejected`, or `inner` when the
/// estimate is zero and only the fixed step is taken). Each outer loop costs
/// `s + 2` products: `s` inner gradients, `Ag` for the two candidate
/// objectives `f(x − tg) = f(x) − t‖g‖² + ½t²gᵀAg`, and the gradient at the
/// new start. Momentum restarts after every kick.
pub fn run_kick(p: &QuadraticProblem, x0: &[f64], kc: &KickConfig, cfg: &SolverConfig) -> Result<SolverRun> {
    cfg.validate_momentum()?;
    check_dim(p.dim(), x0.len())?;
    if kc.s == 0 {
        return Err(Error::invalid("kick period s must be at least 1"));
    }
    let (first_alpha, inner_alpha, fixed_alpha) = if kc.use_two_over_lambda1 {
        let l1 = p.require_lambda1()?;
        let first = if kc.first_step_one_over_lambda1 { 1.0 / l1 } else { 2.0 / l1 };
        (first, 2.0 / l1, 1.0 / l1)
    } else {
        if !(cfg.alpha > 0.0 && cfg.alpha.is_finite()) {
            return Err(Error::invalid(format!("step size must be positive, got {}", cfg.alpha)));
        }
        (cfg.alpha, cfg.alpha, cfg.alpha)
    };

    let mut mv = MatvecCounter::new();
    let mut x = x0.to_vec();
    let mut g = mv.gradient(p, &x);
    let g_tol = cfg.resolved_g_tol(norm(&g));
    let mut trace = vec![start_record(p, &x, &g, mv.count())];
    let mut monitor = kc.use_two_over_lambda1.then(|| GrowthMonitor::new(cfg.div_factor, norm(&g)));
    let mut k = 0usize;

    if let Some(t) = stop_reason(norm(&g), g_tol, trace[0].f, cfg.f_floor) {
        return Ok(SolverRun { trace, x, g, termination: t, matvecs: mv.count() });
    }

    let mut termination = Termination::MaxIterations;
    'outer: while k < cfg.max_iter {
        let mut st = GdmState::from_parts(x, g, first_alpha, cfg.beta);
        let mut last_alpha = first_alpha;
        for l in 0..kc.s {
            let alpha = if l == 0 { first_alpha } else { inner_alpha };
            let x_next = st.next_x(alpha);
            let g_next = mv.gradient(p, &x_next);
            if !all_finite(&x_next) || !all_finite(&g_next) {
                return Err(non_finite(k + 1, &st.x, &trace));
            }
            st.advance(x_next, g_next);
            last_alpha = alpha;
            k += 1;
            let gnorm = norm(&st.g);
            let f = eval_f_with_grad(p, &st.x, &st.g);
            trace.push(IterationRecord::new(k, f, gnorm * gnorm, alpha, Phase::Inner, mv.count()));
            if let Some(factor) = monitor.as_mut().and_then(|m| m.observe(gnorm)) {
                return Err(grew(k, factor, &st.x, &trace));
            }
            if let Some(t) = stop_reason(gnorm, g_tol, f, cfg.f_floor) {
                termination = t;
                x = st.x;
                g = st.g;
                break 'outer;
            }
            if k >= cfg.max_iter {
                x = st.x;
                g = st.g;
                break 'outer;
            }
        }

        let GdmState { x: xs, g: gs, g_prev, .. } = st;
        let nu1 = rayleigh_nu(&g_prev, &gs)?;
        let lambda = (1.0 + cfg.beta - nu1) / last_alpha;
        let f_here = eval_f_with_grad(p, &xs, &gs);
        let gg = norm_sq(&gs);

        k += 1;
        let mut rec;
        let step = match kick_length(lambda, kc.mode) {
            Ok(t_kick) => {
                let ag = mv.matvec(p.op(), &gs);
                let gag = dot(&gs, &ag);
                let f_at = |t: f64| f_here - t * gg + 0.5 * t * t * gag;
                let (f_kick, f_fixed) = (f_at(t_kick), f_at(fixed_alpha));
                let accept = f_kick < f_fixed;
                rec = IterationRecord::new(
                    k,
                    0.0,
                    0.0,
                    if accept { t_kick } else { fixed_alpha },
                    if accept { Phase::KickAccepted } else { Phase::KickRejected },
                    0,
                );
                rec.f_kick = Some(f_kick);
                rec.f_fixed = Some(f_fixed);
                if accept {
                    t_kick
                } else {
                    fixed_alpha
                }
            }
            Err(_) => {
                rec = IterationRecord::new(k, 0.0, 0.0, fixed_alpha, Phase::Inner, 0);
                fixed_alpha
            }
        };
        rec.nu1 = Some(nu1);
        rec.lambda_n = Some(lambda);

        let x_new: Vec<f64> = xs.iter().zip(&gs).map(|(xi, gi)| xi - step * gi).collect();
        let g_new = mv.gradient(p, &x_new);
        if !all_finite(&x_new) || !all_finite(&g_new) {
            return Err(non_finite(k, &xs, &trace));
        }
        let gnorm = norm(&g_new);
        rec.f = eval_f_with_grad(p, &x_new, &g_new);
        rec.gnorm_sq = gnorm * gnorm;
        rec.matvecs_cum = mv.count();
        let f = rec.f;
        trace.push(rec);
        x = x_new;
        g = g_new;
        if let Some(factor) = monitor.as_mut().and_then(|m| m.observe(gnorm)) {
            return Err(grew(k, factor, &x, &trace));
        }
        if let Some(t) = stop_reason(gnorm, g_tol, f, cfg.f_floor) {
            termination = t;
            break;
        }
    }
    Ok(SolverRun { trace, x, g, termination, matvecs: mv.count() })
}
