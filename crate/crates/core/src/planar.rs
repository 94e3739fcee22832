//! Two-dimensional quadratics solved exactly by gradient steps.
//!
//! With the largest eigenvalue `λ₁` known, one step of size `1/λ₁` removes
//! the `v₁` component, which exposes `v₂` and hence `λ₂ = v₂ᵀAv₂`; a second
//! step of size `1/λ₂` lands on the stationary point. When only an
//! overestimate `cλ₁` is available, fixed-step iterations are run until the
//! Rayleigh estimate stalls and the same two steps finish the job.

use crate::error::{Error, Result};
use crate::gdeig::gdeig_step;
use crate::gdm::GdmState;
use crate::eig::jacobi_eigen;
use crate::linops::{check_dim, DenseMatrix, QuadraticProblem};
use crate::vecops::{dot, norm, normalized};
use crate::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nature {
    Minimizer,
    SaddlePoint,
    Maximizer,
    /// `λ₂ = 0`: the stationary set is a line, or empty (least-squares point).
    DegenerateRank1,
}

impl Nature {
    pub fn label(self) -> &'static str {
        match self {
            Nature::Minimizer => "minimizer",
            Nature::SaddlePoint => "saddle-point",
            Nature::Maximizer => "maximizer",
            Nature::DegenerateRank1 => "degenerate-rank1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarNote {
    /// `A = λ₁I`; every direction is an eigenvector and `λ₂ = λ₁`.
    RepeatedEigenvalue,
    /// The start had no component along one eigenvector, so the stalled
    /// estimate belonged to the larger eigenvalue.
    MissingComponent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StationaryPoint {
    Point(Vec<f64>),
    /// `λ₂ = 0` and `b ∉ range(A)`: `f` is unbounded below and `x` is the
    /// least-squares point reached; `residual = ‖g‖ = |v₂ᵀb|`.
    LeastSquares { x: Vec<f64>, residual: f64 },
}

impl StationaryPoint {
    pub fn x(&self) -> &[f64] {
        match self {
            StationaryPoint::Point(x) => x,
            StationaryPoint::LeastSquares { x, .. } => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarResult {
    pub stationary: StationaryPoint,
    pub eig1: (f64, Vec<f64>),
    pub eig2: (f64, Vec<f64>),
    pub nature: Nature,
    /// Gradient steps taken.
    pub steps_used: usize,
    pub notes: Vec<PlanarNote>,
}

fn rotate(v: &[f64]) -> Vec<f64> {
    vec![-v[1], v[0]]
}

fn rayleigh(p: &QuadraticProblem, v: &[f64]) -> Result<f64> {
    Ok(dot(v, &p.op().matvec(v)?) / dot(v, v))
}

fn gradient_step(p: &QuadraticProblem, x: &[f64], g: &[f64], t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let x1: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| xi - t * gi).collect();
    let g1 = crate::linops::eval_g(p, &x1)?;
    Ok((x1, g1))
}

fn nature_of(l1: f64, l2: f64) -> Nature {
    match (l1 > 0.0, l2 > 0.0) {
        _ if l2 == 0.0 || l1 == 0.0 => Nature::DegenerateRank1,
        (true, true) => Nature::Minimizer,
        (false, false) => Nature::Maximizer,
        _ => Nature::SaddlePoint,
    }
}

fn require_planar(p: &QuadraticProblem, x0: &[f64]) -> Result<()> {
    if p.dim() != 2 {
        return Err(Error::invalid(format!("planar solver requires n=2, got n={}", p.dim())));
    }
    check_dim(2, x0.len())
}

/// Exact solve with the problem's `λ₁` (must be the true largest eigenvalue).
///
/// A vector counts as zero when its norm is at most
/// `1e-12·(‖x⁽¹⁾‖ + ‖b‖/λ₁)`. Fails with [`Error::Lambda1Inexact`] when the
/// second step does not reach a stationary point.
pub fn planar_solve_known_l1(p: &QuadraticProblem, x0: &[f64]) -> Result<PlanarResult> {
    require_planar(p, x0)?;
    let l1 = p.require_lambda1()?;
    let b = p.b();
    let g0 = crate::linops::eval_g(p, x0)?;
    let (x1, g1) = gradient_step(p, x0, &g0, 1.0 / l1)?;
    let b_over = norm(b) / l1;
    let zero = 1e-12 * (norm(&x1) + b_over);
    let is_zero = |v: &[f64]| norm(v) <= zero;

    let w: Vec<f64> = x1.iter().zip(b).map(|(x, bi)| x - bi / l1).collect();
    let mut notes = Vec::new();
    let v2 = if !is_zero(&w) {
        normalized(&w)
    } else {
        let ab = p.op().matvec(b)?;
        let z: Vec<f64> = g1.iter().zip(b).zip(&ab).map(|((g, bi), a)| g + bi - a / l1).collect();
        if !is_zero(&z) {
            normalized(&z)
        } else if !is_zero(&g1) {
            normalized(&g1)
        } else {
            // x¹ is already stationary; read v₂ off a column of A − λ₁I
            let a = p.op().to_dense();
            let cols = [vec![a.get(0, 0) - l1, a.get(1, 0)], vec![a.get(0, 1), a.get(1, 1) - l1]];
            let best = cols.into_iter().max_by(|u, v| norm(u).total_cmp(&norm(v))).unwrap_or_default();
            if norm(&best) <= 1e-12 * l1 {
                notes.push(PlanarNote::RepeatedEigenvalue);
                Some(vec![0.0, 1.0])
            } else {
                normalized(&best)
            }
        }
    };
    let v2 = v2.ok_or(Error::DegenerateIterate)?;
    let v1 = rotate(&v2);
    let l2 = if notes.contains(&PlanarNote::RepeatedEigenvalue) { l1 } else { rayleigh(p, &v2)? };

    if l2.abs() <= 1e-12 * l1 {
        let stationary = if is_zero(&g1) {
            StationaryPoint::Point(x1)
        } else {
            StationaryPoint::LeastSquares { residual: norm(&g1), x: x1 }
        };
        return Ok(PlanarResult {
            stationary,
            eig1: (l1, v1),
            eig2: (0.0, v2),
            nature: Nature::DegenerateRank1,
            steps_used: 1,
            notes,
        });
    }
    if is_zero(&g1) {
        return Ok(PlanarResult {
            stationary: StationaryPoint::Point(x1),
            eig1: (l1, v1),
            eig2: (l2, v2),
            nature: nature_of(l1, l2),
            steps_used: 1,
            notes,
        });
    }

    let (x2, g2) = gradient_step(p, &x1, &g1, 1.0 / l2)?;
    let scale = l1.max(l2.abs()) * norm(x0) + norm(b);
    let tolerance = 1e-8 * scale * (l1 / l2).abs().max(1.0);
    let residual = norm(&g2);
    if !(residual <= tolerance) {
        return Err(Error::Lambda1Inexact { residual, tolerance });
    }
    Ok(PlanarResult {
        stationary: StationaryPoint::Point(x2),
        eig1: (l1, v1),
        eig2: (l2, v2),
        nature: nature_of(l1, l2),
        steps_used: 2,
        notes,
    })
}

/// Solve with step `1/c_lambda1` for an overestimate `c_lambda1 ≥ λ₁`.
///
/// Iterates until `|ν₁⁽ᴷ⁺¹⁾ − ν₁⁽ᴷ⁾| ≤ stall_tol·max(1, |ν₁⁽ᴷ⁾|)`, takes the
/// newest gradient and its 90° rotation as a basis, refines the eigen-pairs by
/// a Rayleigh–Ritz projection onto that basis and then takes the two steps
/// `1/λ₁`, `1/λ₂`.
pub fn planar_solve_overestimate(
    p: &QuadraticProblem,
    x0: &[f64],
    c_lambda1: f64,
    stall_tol: f64,
    max_iter: usize,
) -> Result<PlanarResult> {
    require_planar(p, x0)?;
    if !(c_lambda1 > 0.0 && c_lambda1.is_finite()) {
        return Err(Error::invalid(format!("overestimate must be positive, got {c_lambda1}")));
    }
    let alpha = 1.0 / c_lambda1;
    let cfg = SolverConfig::with_step(alpha, 0.0);
    let mut st = GdmState::new(p, x0, alpha, 0.0)?;
    let mut last_nu: Option<f64> = None;
    let mut stalled = false;
    let mut steps = 0;
    for _ in 0..max_iter {
        let (next, est) = gdeig_step(p, &st, &cfg)?;
        st = next;
        steps += 1;
        if let Some(prev) = last_nu {
            if (est.nu1 - prev).abs() <= stall_tol * prev.abs().max(1.0) {
                stalled = true;
                break;
            }
        }
        last_nu = Some(est.nu1);
    }
    if !stalled {
        return Err(Error::NoStall { iterations: steps, last_nu1: last_nu.unwrap_or(f64::NAN) });
    }
    // the recurrence gradient equals the direct one in exact arithmetic
    let g = crate::linops::eval_g(p, &st.x)?;
    let v_found = normalized(&g).ok_or(Error::ConvergedBeforeEstimate)?;
    let v_other = rotate(&v_found);
    // Rayleigh–Ritz on span{v_found, v_other} = R²: exact up to rounding
    let av = p.op().matvec(&v_found)?;
    let ao = p.op().matvec(&v_other)?;
    let c = 0.5 * (dot(&v_found, &ao) + dot(&v_other, &av));
    let small = DenseMatrix::from_rows(&[&[dot(&v_found, &av), c], &[c, dot(&v_other, &ao)]])?;
    let e = jacobi_eigen(&small)?;
    let lift = |y: Vec<f64>| -> Vec<f64> { (0..2).map(|i| y[0] * v_found[i] + y[1] * v_other[i]).collect() };
    let (l2, y2) = e.leftmost();
    let (l1, y1) = e.rightmost();
    let mut notes = Vec::new();
    if y1[0].abs() > y1[1].abs() {
        notes.push(PlanarNote::MissingComponent);
    }
    let (v1, v2) = (lift(y1), lift(y2));
    if l1 <= 0.0 {
        return Err(Error::invalid("planar solver requires a positive largest eigenvalue"));
    }

    let (x1, g1) = gradient_step(p, &st.x, &g, 1.0 / l1)?;
    steps += 1;
    let zero = 1e-12 * (norm(&x1) + norm(p.b()) / l1);
    if l2.abs() <= 1e-12 * l1 {
        let stationary = if norm(&g1) <= zero {
            StationaryPoint::Point(x1)
        } else {
            StationaryPoint::LeastSquares { residual: norm(&g1), x: x1 }
        };
        return Ok(PlanarResult { stationary, eig1: (l1, v1), eig2: (0.0, v2), nature: Nature::DegenerateRank1, steps_used: steps, notes });
    }
    let x_final = if norm(&g1) <= zero {
        x1
    } else {
        steps += 1;
        gradient_step(p, &x1, &g1, 1.0 / l2)?.0
    };
    Ok(PlanarResult {
        stationary: StationaryPoint::Point(x_final),
        eig1: (l1, v1),
        eig2: (l2, v2),
        nature: nature_of(l1, l2),
        steps_used: steps,
        notes,
    })
}
