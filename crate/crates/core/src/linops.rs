//! Symmetric operators accessed through matrix-vector products, the quadratic
//! objective `f(x) = ½xᵀAx − bᵀx`, and the shifted iteration operator
//! `Ĥ = (1+β)I − αA`.
//!
//! Operators and problems are immutable once built and cheap to clone (the
//! backing storage sits behind an `Arc`), so concurrent runs can share them.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::vecops::{dot, norm};

pub use crate::eig::{dense_eig_oracle, EigenDecomposition};

/// Largest dimension for which a dense copy of the operator is retained.
pub const DENSE_LIMIT: usize = 2000;

pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// `out ← Op·v`. Callers guarantee both slices have length `dim()`.
    fn apply_into(&self, v: &[f64], out: &mut [f64]);

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), v.len())?;
        let mut out = vec![0.0; v.len()];
        self.apply_into(v, &mut out);
        Ok(out)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Row-major square matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(n * n, data.len())?;
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            check_dim(n, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn matvec_into(&self, v: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.n)) {
            *o = dot(row, v);
        }
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DenseMatrix").field("n", &self.n).finish_non_exhaustive()
    }
}

type MatvecFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

#[derive(Clone)]
enum Backing {
    Dense(Arc<DenseMatrix>),
    MatrixFree(Arc<MatvecFn>),
}

/// A symmetric `n×n` operator. Small operators keep a dense copy so the
/// Jacobi oracle can read it directly; otherwise only the product is kept.
#[derive(Clone)]
pub struct SymmetricOperator {
    n: usize,
    backing: Backing,
}

impl fmt::Debug for SymmetricOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.backing {
            Backing::Dense(_) => "dense",
            Backing::MatrixFree(_) => "matrix-free",
        };
        f.debug_struct("SymmetricOperator").field("n", &self.n).field("backing", &kind).finish()
    }
}

impl SymmetricOperator {
    /// Wraps a dense matrix. Rejects matrices whose asymmetry exceeds
    /// `1e-12·max|a_ij|`.
    pub fn from_dense(m: DenseMatrix) -> Result<Self> {
        if m.n == 0 {
            return Err(Error::invalid("operator dimension must be positive"));
        }
        let scale = m.data.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let asym = m.max_asymmetry();
        if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NonSymmetric { max_asymmetry: asym });
        }
        let n = m.n;
        let m = Arc::new(m);
        let backing = if n <= DENSE_LIMIT {
            Backing::Dense(m)
        } else {
            Backing::MatrixFree(Arc::new(move |v: &[f64], out: &mut [f64]| m.matvec_into(v, out)))
        };
        Ok(Self { n, backing })
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::from_dense(DenseMatrix::diagonal(d))
    }

    /// A matrix-free operator. The closure must implement a symmetric map;
    /// [`SymmetricOperator::symmetry_defect`] can spot-check that.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        if n == 0 {
            return Err(Error::invalid("operator dimension must be positive"));
        }
        Ok(Self { n, backing: Backing::MatrixFree(Arc::new(f)) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn dense(&self) -> Option<&DenseMatrix> {
        match &self.backing {
            Backing::Dense(m) => Some(m),
            Backing::MatrixFree(_) => None,
        }
    }

    /// Dense copy, built column by column from `n` products if necessary.
    pub fn to_dense(&self) -> DenseMatrix {
        if let Some(m) = self.dense() {
            return m.clone();
        }
        let n = self.n;
        let mut m = DenseMatrix::zeros(n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply_into(&e, &mut col);
            e[j] = 0.0;
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        LinearOperator::apply(self, v)
    }

    /// Estimate of `‖A‖₂` from a few power iterations on a seeded start.
    pub fn norm_estimate(&self, iterations: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0005_eed0_fa11);
        let mut v: Vec<f64> = (0..self.n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut w = vec![0.0; self.n];
        let mut est = 0.0;
        for _ in 0..iterations.max(1) {
            let nv = norm(&v);
            if nv == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|x| *x /= nv);
            self.apply_into(&v, &mut w);
            est = norm(&w);
            std::mem::swap(&mut v, &mut w);
        }
        est
    }

    /// `|uᵀ(Av) − vᵀ(Au)| / (‖u‖‖v‖‖A‖)` for seeded random `u, v`, maximised
    /// over `samples` draws.
    pub fn symmetry_defect(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a_norm = self.norm_estimate(8).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        let mut au = vec![0.0; self.n];
        let mut av = vec![0.0; self.n];
        for _ in 0..samples {
            let u: Vec<f64> = (0..self.n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let v: Vec<f64> = (0..self.n).map(|_| StandardNormal.sample(&mut rng)).collect();
            self.apply_into(&u, &mut au);
            self.apply_into(&v, &mut av);
            let d = (dot(&u, &av) - dot(&v, &au)).abs() / (norm(&u) * norm(&v) * a_norm);
            worst = worst.max(d);
        }
        worst
    }
}

impl LinearOperator for SymmetricOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        match &self.backing {
            Backing::Dense(m) => m.matvec_into(v, out),
            Backing::MatrixFree(f) => f(v, out),
        }
    }
}

/// `f(x) = ½xᵀAx − bᵀx` together with an optional known largest eigenvalue
/// `λ₁` (the Lipschitz constant of the gradient).
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    op: SymmetricOperator,
    b: Vec<f64>,
    lambda1: Option<f64>,
}

impl QuadraticProblem {
    pub fn new(op: SymmetricOperator, b: Vec<f64>) -> Result<Self> {
        check_dim(op.dim(), b.len())?;
        Ok(Self { op, b, lambda1: None })
    }

    /// `f(x) = ½xᵀAx`.
    pub fn homogeneous(op: SymmetricOperator) -> Self {
        let b = vec![0.0; op.dim()];
        Self { op, b, lambda1: None }
    }

    pub fn with_lambda1(mut self, lambda1: f64) -> Result<Self> {
        if !(lambda1 > 0.0 && lambda1.is_finite()) {
            return Err(Error::invalid(format!("lambda1 must be positive and finite, got {lambda1}")));
        }
        self.lambda1 = Some(lambda1);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &SymmetricOperator {
        &self.op
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn lambda1(&self) -> Option<f64> {
        self.lambda1
    }

    pub fn require_lambda1(&self) -> Result<f64> {
        self.lambda1.ok_or(Error::MissingLambda1)
    }
}

/// `½xᵀAx − bᵀx`; one product with `A`.
pub fn eval_f(p: &QuadraticProblem, x: &[f64]) -> Result<f64> {
    let ax = p.op.matvec(x)?;
    Ok(0.5 * dot(x, &ax) - dot(p.b(), x))
}

/// `Ax − b`; one product with `A`.
pub fn eval_g(p: &QuadraticProblem, x: &[f64]) -> Result<Vec<f64>> {
    let mut g = p.op.matvec(x)?;
    for (gi, bi) in g.iter_mut().zip(p.b()) {
        *gi -= bi;
    }
    Ok(g)
}

/// `f(x)` from an already computed gradient `g = Ax − b`, with no product:
/// `f = ½xᵀ(g − b)`.
pub fn eval_f_with_grad(p: &QuadraticProblem, x: &[f64], g: &[f64]) -> f64 {
    x.iter().zip(g).zip(p.b()).map(|((xi, gi), bi)| xi * (gi - bi)).sum::<f64>() * 0.5
}

/// `Ĥ = (1+β)I − αA`, applied as `u ← Av; Ĥv ← (1+β)v − αu` and never formed.
/// With `β = 0` this is `H = I − αA`.
#[derive(Debug, Clone)]
pub struct ShiftedOperator {
    base: SymmetricOperator,
    alpha: f64,
    beta: f64,
}

impl ShiftedOperator {
    pub fn new(base: SymmetricOperator, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("step size must be nonnegative, got {alpha}")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::invalid(format!("momentum must lie in [0, 1], got {beta}")));
        }
        Ok(Self { base, alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn base(&self) -> &SymmetricOperator {
        &self.base
    }

    /// `(1+β)v − α·av` given `av = Av`.
    pub fn combine(&self, v: &[f64], av: &[f64], out: &mut [f64]) {
        let s = 1.0 + self.beta;
        for ((o, vi), ai) in out.iter_mut().zip(v).zip(av) {
            *o = s * vi - self.alpha * ai;
        }
    }
}

impl LinearOperator for ShiftedOperator {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let mut av = vec![0.0; v.len()];
        self.base.apply_into(v, &mut av);
        self.combine(v, &av, out);
    }
}

pub fn apply_shifted(h: &ShiftedOperator, v: &[f64]) -> Result<Vec<f64>> {
    h.apply(v)
}

/// Eigenvalues of `Ĥ` from those of `A`.
///
/// Input is ascending (`λₙ ≤ … ≤ λ₁`); output is descending
/// (`ν₁ ≥ … ≥ νₙ`) with `νᵢ = 1 + β − αλ_{n−i+1}`. The eigenvector order is
/// reversed: `νᵢ` belongs to the eigenvector of `λ_{n−i+1}`, so `ν₁` pairs with
/// the leftmost eigenvector of `A`.
pub fn shifted_spectrum(eigs_ascending: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    eigs_ascending.iter().map(|&l| 1.0 + beta - alpha * l).collect()
}

/// Counts products with `A` made on behalf of one solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatvecCounter {
    count: u64,
}

impl MatvecCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn matvec(&mut self, op: &SymmetricOperator, v: &[f64]) -> Vec<f64> {
        self.count += 1;
        let mut out = vec![0.0; v.len()];
        op.apply_into(v, &mut out);
        out
    }

    pub fn gradient(&mut self, p: &QuadraticProblem, x: &[f64]) -> Vec<f64> {
        let mut g = self.matvec(p.op(), x);
        for (gi, bi) in g.iter_mut().zip(p.b()) {
            *gi -= bi;
        }
        g
    }
}
