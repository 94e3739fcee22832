//! Reference methods: steepest descent with the exact step, and the
//! constant-momentum accelerated gradient method for strongly convex
//! quadratics.

use crate::config::{SolverConfig, SolverRun, Termination};
use crate::error::{Error, Result};
use crate::gdm::{non_finite, start_record, stop_reason};
use crate::linops::{check_dim, eval_f_with_grad, MatvecCounter, QuadraticProblem};
use crate::trace::{IterationRecord, Phase};
use crate::vecops::{all_finite, dot, norm, norm_sq};

/// Steepest descent with `t = gᵀg/gᵀAg`, the exact minimiser of `f` along
/// `−g`. When `gᵀAg ≤ 0` the objective is unbounded along `−g`; the step is
/// then `cfg.neg_curvature_step` (default `10/λ₁`, or 10 without `λ₁`) and
/// the record is labelled `neg-curvature-ray`.
///
/// One product per iteration: the gradient is updated as `g − tAg` and
/// recomputed from `x` every `cfg.resync_every` iterations.
pub fn exact_step_gd(p: &QuadraticProblem, x0: &[f64], cfg: &SolverConfig) -> Result<SolverRun> {
    check_dim(p.dim(), x0.len())?;
    if cfg.max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    let t_max = cfg.neg_curvature_step.unwrap_or_else(|| p.lambda1().map_or(10.0, |l| 10.0 / l));
    let mut mv = MatvecCounter::new();
    let mut x = x0.to_vec();
    let mut g = mv.gradient(p, &x);
    let g_tol = cfg.resolved_g_tol(norm(&g));
    let mut trace = vec![start_record(p, &x, &g, mv.count())];
    let mut termination = stop_reason(norm(&g), g_tol, trace[0].f, cfg.f_floor);

    let mut k = 0;
    while termination.is_none() && k < cfg.max_iter {
        let ag = mv.matvec(p.op(), &g);
        let gg = norm_sq(&g);
        let gag = dot(&g, &ag);
        let (t, phase) = if gag > 0.0 { (gg / gag, Phase::Inner) } else { (t_max, Phase::NegCurvatureRay) };
        let x_next: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
        k += 1;
        let g_next = if cfg.resync_every > 0 && k % cfg.resync_every == 0 {
            mv.gradient(p, &x_next)
        } else {
            g.iter().zip(&ag).map(|(gi, ai)| gi - t * ai).collect()
        };
        if !all_finite(&x_next) || !all_finite(&g_next) {
            return Err(non_finite(k, &x, &trace));
        }
        x = x_next;
        g = g_next;
        let f = eval_f_with_grad(p, &x, &g);
        let gnorm = norm(&g);
        trace.push(IterationRecord::new(k, f, gnorm * gnorm, t, phase, mv.count()));
        termination = stop_reason(gnorm, g_tol, f, cfg.f_floor);
    }
    Ok(SolverRun { trace, x, g, termination: termination.unwrap_or(Termination::MaxIterations), matvecs: mv.count() })
}

/// Accelerated gradient for `0 < λₙ ≤ λ₁`:
/// `x⁽ᵏ⁺¹⁾ = y⁽ᵏ⁾ − (1/λ₁)g(y⁽ᵏ⁾)`, `y⁽ᵏ⁺¹⁾ = x⁽ᵏ⁺¹⁾ + q(x⁽ᵏ⁺¹⁾ − x⁽ᵏ⁾)` with
/// `q = (√κ − 1)/(√κ + 1)`, `κ = λ₁/λₙ`. Records describe `x⁽ᵏ⁾`. Gradients
/// at `x` and `y` follow by linearity, so each iteration costs one product.
pub fn accelerated_gd(p: &QuadraticProblem, x0: &[f64], lambda1: f64, lambda_n: f64, cfg: &SolverConfig) -> Result<SolverRun> {
    check_dim(p.dim(), x0.len())?;
    if !(lambda_n > 0.0) {
        return Err(Error::NotStronglyConvex { lambda_n });
    }
    if !(lambda1 >= lambda_n && lambda1.is_finite()) {
        return Err(Error::invalid(format!("need lambda1 >= lambda_n, got {lambda1} < {lambda_n}")));
    }
    let kappa = lambda1 / lambda_n;
    let q = (kappa.sqrt() - 1.0) / (kappa.sqrt() + 1.0);
    let step = 1.0 / lambda1;

    let mut mv = MatvecCounter::new();
    let mut x = x0.to_vec();
    let mut gx = mv.gradient(p, &x);
    let mut y = x.clone();
    let mut gy = gx.clone();
    let g_tol = cfg.resolved_g_tol(norm(&gx));
    let mut trace = vec![start_record(p, &x, &gx, mv.count())];
    let mut termination = stop_reason(norm(&gx), g_tol, trace[0].f, cfg.f_floor);

    let mut k = 0;
    while termination.is_none() && k < cfg.max_iter {
        k += 1;
        let x_next: Vec<f64> = y.iter().zip(&gy).map(|(yi, gi)| yi - step * gi).collect();
        let gx_next = if cfg.resync_every > 0 && k % cfg.resync_every == 0 {
            mv.gradient(p, &x_next)
        } else {
            let agy = mv.matvec(p.op(), &gy);
            gy.iter().zip(&agy).map(|(gi, ai)| gi - step * ai).collect()
        };
        if !all_finite(&x_next) || !all_finite(&gx_next) {
            return Err(non_finite(k, &x, &trace));
        }
        y = x_next.iter().zip(&x).map(|(a, b)| a + q * (a - b)).collect();
        gy = gx_next.iter().zip(&gx).map(|(a, b)| a + q * (a - b)).collect();
        x = x_next;
        gx = gx_next;
        let f = eval_f_with_grad(p, &x, &gx);
        let gnorm = norm(&gx);
        trace.push(IterationRecord::new(k, f, gnorm * gnorm, step, Phase::Inner, mv.count()));
        termination = stop_reason(gnorm, g_tol, f, cfg.f_floor);
    }
    Ok(SolverRun { trace, x, g: gx, termination: termination.unwrap_or(Termination::MaxIterations), matvecs: mv.count() })
}
