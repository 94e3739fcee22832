//! Closed-form iterates for two saddle-point examples.
//!
//! `f_σ(x) = ½x₁² − (σ/2)x₂²` under gradient descent with `α = 1`, and
//! `f(x) = x₁² − x₂²` (locally, near the origin) with `α = 1/4`.

use crate::error::{Error, Result};
use crate::linops::{QuadraticProblem, SymmetricOperator};

/// Growth-mode magnitude beyond which closed-form comparisons stop.
pub const OVERFLOW_GUARD: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaternainProblem {
    pub sigma: f64,
}

impl PaternainProblem {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    /// `A = diag(1, −σ)`, `b = 0`, `λ₁ = 1`.
    pub fn problem(&self) -> QuadraticProblem {
        let op = SymmetricOperator::diagonal(&[1.0, -self.sigma]).expect("diagonal is symmetric");
        QuadraticProblem::homogeneous(op).with_lambda1(1.0).expect("positive")
    }

    /// Largest `k` with `(1+σ)^k ≤` [`OVERFLOW_GUARD`].
    pub fn max_safe_k(&self) -> usize {
        (OVERFLOW_GUARD.ln() / self.sigma.ln_1p()).floor() as usize
    }
}

/// `(x⁽ᵏ⁾, g⁽ᵏ⁾)` for `α = 1`, `k ≥ 1`: `x⁽ᵏ⁾ = (0, (1+σ)^k x₂⁰)`,
/// `g⁽ᵏ⁾ = (0, −σ(1+σ)^k x₂⁰)`.
pub fn paternain_closed_form(sigma: f64, x0: &[f64; 2], k: u32) -> Result<([f64; 2], [f64; 2])> {
    if k == 0 {
        return Err(Error::invalid("closed form holds for k >= 1"));
    }
    let growth = (1.0 + sigma).powi(k as i32) * x0[1];
    Ok(([0.0, growth], [0.0, -sigma * growth]))
}

/// `x₂` after a step of length `1/α₂` taken from `x⁽²⁾`:
/// `(1 + σ/α₂)·x₂⁽²⁾`. `α₂ = σ` doubles the escaping coordinate; `α₂ = −σ`
/// lands on the saddle.
pub fn paternain_long_step(sigma: f64, x2_at_2: f64, alpha2: f64) -> f64 {
    x2_at_2 - (1.0 / alpha2) * (-sigma * x2_at_2)
}

/// `|x₂⁽³⁾|/|x₂⁽⁰⁾| = 2(1+σ)²` for two unit steps followed by the step of
/// length `1/σ`.
pub fn paternain_escape_factor(sigma: f64) -> f64 {
    2.0 * (1.0 + sigma).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DuQuadraticRegion;

impl DuQuadraticRegion {
    pub const STEP: f64 = 0.25;
    /// Half-width of the square neighbourhood `[−1, 1]²` around the saddle.
    pub const HALF_WIDTH: f64 = 1.0;

    /// `A = diag(2, −2)`, `b = 0`, `λ₁ = 2`.
    pub fn problem(&self) -> QuadraticProblem {
        let op = SymmetricOperator::diagonal(&[2.0, -2.0]).expect("diagonal is symmetric");
        QuadraticProblem::homogeneous(op).with_lambda1(2.0).expect("positive")
    }

    pub fn contains(&self, x: &[f64; 2]) -> bool {
        x[0].abs() <= Self::HALF_WIDTH && x[1].abs() <= Self::HALF_WIDTH
    }
}

/// `(x⁽ᵏ⁾, g⁽ᵏ⁾)` for `α = 1/4`: `x⁽ᵏ⁾ = ((1/2)^k x₁⁰, (3/2)^k x₂⁰)` and
/// `g⁽ᵏ⁾ = Ax⁽ᵏ⁾ = (2(1/2)^k x₁⁰, −2(3/2)^k x₂⁰)`.
pub fn du_closed_form(x0: &[f64; 2], k: u32) -> ([f64; 2], [f64; 2]) {
    let a = 0.5f64.powi(k as i32) * x0[0];
    let c = 1.5f64.powi(k as i32) * x0[1];
    ([a, c], [2.0 * a, -2.0 * c])
}

/// Rayleigh estimate reported at iteration `k ≥ 1`:
/// `((1/2)^{2m+1}(x₁⁰)² + (3/2)^{2m+1}(x₂⁰)²) / ((1/2)^{2m}(x₁⁰)² + (3/2)^{2m}(x₂⁰)²)`
/// with `m = k − 1`, i.e. the quotient formed from `g⁽ᵏ⁻¹⁾` and `g⁽ᵏ⁾`.
pub fn du_nu_closed_form(x0: &[f64; 2], k: u32) -> Result<f64> {
    if x0[0] == 0.0 && x0[1] == 0.0 {
        return Err(Error::invalid("initial point must be nonzero"));
    }
    if k == 0 {
        return Err(Error::invalid("the first estimate is reported at k = 1"));
    }
    let m = 2 * (k - 1) as i32;
    let (a, c) = (x0[0] * x0[0], x0[1] * x0[1]);
    // scale by (3/2)^{-2m} when x₂⁰ ≠ 0 so large k does not overflow
    if c > 0.0 {
        let r = (1.0 / 3.0f64).powi(m) * a;
        Ok((0.5 * r + 1.5 * c) / (r + c))
    } else {
        Ok(0.5)
    }
}

/// `2·(3/2)^{−exp(1/ε)}`, the width of the band of starting `x₂` values that
/// keep gradient descent near the saddle for `exp(1/ε)` iterations.
/// Underflows to exactly `0.0` for small `ε` (e.g. `ε = 0.1`).
pub fn initialization_band_width(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(2.0 * 1.5f64.powf(-(1.0 / epsilon).exp()))
}
