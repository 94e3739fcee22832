//! Power method with momentum on a symmetric operator `M`:
//! `y⁽ᵏ⁺¹⁾ = My⁽ᵏ⁾ − βy⁽ᵏ⁻¹⁾`, normalised every iteration.
//!
//! The normalised iterate keeps the direction of the unnormalised recurrence
//! exactly: the previous vector is stored rescaled by the same factor as the
//! current one. With `M = Ĥ` and `w⁽⁰⁾ ∝ g⁽⁰⁾` the iterates are the normalised
//! gradients of momentum gradient descent.

use crate::error::{Error, Result};
use crate::linops::LinearOperator;
use crate::vecops::{dot, norm};

#[derive(Debug, Clone, PartialEq)]
pub struct PmmState {
    /// Previous iterate, scaled by the normalisation of the current one.
    pub w_prev: Vec<f64>,
    /// Current unit-norm iterate.
    pub w: Vec<f64>,
    /// Rayleigh quotient `wᵀMw` of the iterate before the last step.
    pub nu: Option<f64>,
    pub k: usize,
    pub beta: f64,
}

impl PmmState {
    pub fn new(w0: &[f64], beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::invalid(format!("momentum must lie in [0, 1], got {beta}")));
        }
        let n = norm(w0);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::DegenerateIterate);
        }
        let w = w0.iter().map(|v| v / n).collect();
        Ok(Self { w_prev: vec![0.0; w0.len()], w, nu: None, k: 0, beta })
    }
}

/// Flips `w` (and the stored previous vector with it) so that the entry of
/// largest magnitude is positive.
fn fix_sign(w: &mut [f64], w_prev: &mut [f64]) {
    let lead = w.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if lead < 0.0 {
        w.iter_mut().for_each(|v| *v = -*v);
        w_prev.iter_mut().for_each(|v| *v = -*v);
    }
}

/// One iteration. Returns the successor state together with `Mw⁽ᵏ⁾` (handy
/// for residuals).
fn step_with_product<M: LinearOperator + ?Sized>(m: &M, st: &PmmState) -> Result<(PmmState, Vec<f64>)> {
    let mw = m.apply(&st.w)?;
    let nu = dot(&st.w, &mw);
    let z: Vec<f64> = mw.iter().zip(&st.w_prev).map(|(a, b)| a - st.beta * b).collect();
    let zn = norm(&z);
    if zn == 0.0 || !zn.is_finite() {
        return Err(Error::DegenerateIterate);
    }
    let mut w: Vec<f64> = z.iter().map(|v| v / zn).collect();
    let mut w_prev: Vec<f64> = st.w.iter().map(|v| v / zn).collect();
    fix_sign(&mut w, &mut w_prev);
    Ok((PmmState { w_prev, w, nu: Some(nu), k: st.k + 1, beta: st.beta }, mw))
}

/// Advances one iteration; `nu` of the result is the Rayleigh quotient of the
/// incoming iterate (equal to `wᵀw⁽ᵏ⁾` when `β = 0`).
pub fn pmm_step<M: LinearOperator + ?Sized>(m: &M, st: &PmmState) -> Result<PmmState> {
    step_with_product(m, st).map(|(s, _)| s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmmResult {
    pub nu: f64,
    pub w: Vec<f64>,
    pub iterations: usize,
    /// `‖Mw − νw‖` for the iterate `nu` was computed from.
    pub residual: f64,
    pub converged: bool,
}

/// Iterates until `|Δν| ≤ tol·max(1, |ν|)` or `‖Mw − νw‖ ≤ tol`, or
/// `max_iter` products.
pub fn run_pmm<M: LinearOperator + ?Sized>(m: &M, w0: &[f64], beta: f64, tol: f64, max_iter: usize) -> Result<PmmResult> {
    let mut st = PmmState::new(w0, beta)?;
    let mut last: Option<f64> = None;
    let mut out = PmmResult { nu: f64::NAN, w: st.w.clone(), iterations: 0, residual: f64::INFINITY, converged: false };
    for _ in 0..max_iter {
        let w_in = st.w.clone();
        let (next, mw) = step_with_product(m, &st)?;
        let nu = next.nu.unwrap_or(f64::NAN);
        let residual = norm(&mw.iter().zip(&w_in).map(|(a, w)| a - nu * w).collect::<Vec<_>>());
        out = PmmResult { nu, w: w_in, iterations: next.k, residual, converged: false };
        let stalled = last.is_some_and(|l| (nu - l).abs() <= tol * l.abs().max(1.0));
        if stalled || residual <= tol {
            out.converged = true;
            return Ok(out);
        }
        last = Some(nu);
        st = next;
    }
    out.w = st.w;
    Ok(out)
}

/// Momentum that minimises the power-method rate for a known second
/// eigenvalue: `β = ν₂²/4`.
pub fn optimal_momentum(nu2: f64) -> f64 {
    nu2 * nu2 / 4.0
}
