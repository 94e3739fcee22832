//! Seeded random quadratics with prescribed spectra.
//!
//! Random numbers come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`; normals from `rand_distr::StandardNormal`. A problem is
//! `A = QΛQᵀ` with `Q` the Gram–Schmidt orthonormalisation (applied twice) of
//! a Gaussian matrix, symmetrised exactly after the product.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linops::{DenseMatrix, QuadraticProblem, SymmetricOperator};
use crate::vecops::dot;

#[derive(Debug, Clone, PartialEq)]
pub enum EigLaw {
    /// `λₙ = lo`, `λ₁ = hi`, the rest uniform in `[lo, hi − lo]`, which keeps
    /// `λ₂ ≤ λ₁ − λₙ`.
    UniformPd { lo: f64, hi: f64 },
    /// `neg_count` eigenvalues uniform in `neg_range`, the rest uniform in
    /// `pos_range`; the largest is pinned to `pos_range.1` (and the smallest
    /// to `leftmost` when given), then everything is divided by `λ₁` so that
    /// `λ₁ = 1`.
    Indefinite { neg_count: usize, neg_range: (f64, f64), pos_range: (f64, f64), leftmost: Option<f64> },
    /// `zero_count` exact zeros; the rest uniform in `pos_range` with the
    /// largest pinned to `pos_range.1`.
    Psd { zero_count: usize, pos_range: (f64, f64) },
    Explicit(Vec<f64>),
}

impl EigLaw {
    /// 20% negative eigenvalues in `[−1, −0.1]`, positive ones in `[0.1, 1]`.
    pub fn indefinite_default(n: usize) -> Self {
        EigLaw::Indefinite { neg_count: (n / 5).max(1), neg_range: (-1.0, -0.1), pos_range: (0.1, 1.0), leftmost: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Basis {
    #[default]
    Random,
    /// `A` diagonal, eigenvalues in descending order along the diagonal.
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub n: usize,
    pub law: EigLaw,
    pub seed: u64,
    pub basis: Basis,
}

impl SpectrumSpec {
    pub fn new(n: usize, law: EigLaw, seed: u64) -> Self {
        Self { n, law, seed, basis: Basis::Random }
    }

    pub fn basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rhs {
    Zero,
    /// `b = Ax*` with `x*` standard Gaussian drawn from this seed.
    FromSolution(u64),
}

/// Eigenvalues (ascending) and eigenvectors (columns of `q`, same order) used
/// to build a problem.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub eigenvalues: Vec<f64>,
    pub q: DenseMatrix,
    pub x_star: Option<Vec<f64>>,
}

impl GroundTruth {
    pub fn lambda1(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn lambda_n(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        (0..self.q.n()).map(|r| self.q.get(r, i)).collect()
    }

    /// `(λ₁ − λ_{n−1})/(λ₁ − λₙ)`.
    pub fn gap_ratio(&self) -> f64 {
        let l = &self.eigenvalues;
        (self.lambda1() - l[1]) / (self.lambda1() - l[0])
    }

    /// `f(x*)` when `x*` is known: `−½bᵀx* = −½x*ᵀAx*`.
    pub fn f_star(&self) -> Option<f64> {
        let x = self.x_star.as_ref()?;
        let n = x.len();
        let qx: Vec<f64> = (0..n).map(|i| (0..n).map(|r| self.q.get(r, i) * x[r]).sum()).collect();
        Some(-0.5 * qx.iter().zip(&self.eigenvalues).map(|(c, l)| l * c * c).sum::<f64>())
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo.min(hi)..=hi.max(lo))
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::invalid(format!("{name} range must satisfy lo <= hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

fn draw_spectrum(n: usize, law: &EigLaw, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let mut eig = match law {
        EigLaw::UniformPd { lo, hi } => {
            if !(*lo > 0.0 && hi >= lo) {
                return Err(Error::invalid(format!("uniform PD law needs 0 < lo <= hi, got [{lo}, {hi}]")));
            }
            let top = (hi - lo).max(*lo);
            let mut v = vec![*lo, *hi];
            v.extend((2..n).map(|_| uniform(rng, (*lo, top))));
            v
        }
        EigLaw::Indefinite { neg_count, neg_range, pos_range, leftmost } => {
            check_range("negative", *neg_range)?;
            check_range("positive", *pos_range)?;
            if neg_range.1 >= 0.0 || pos_range.0 <= 0.0 {
                return Err(Error::invalid("indefinite law needs negative and positive ranges on either side of 0"));
            }
            if *neg_count == 0 || *neg_count >= n {
                return Err(Error::invalid(format!("negative count must lie in 1..{n}, got {neg_count}")));
            }
            let mut neg: Vec<f64> = (0..*neg_count).map(|_| uniform(rng, *neg_range)).collect();
            let mut pos: Vec<f64> = (0..n - neg_count).map(|_| uniform(rng, *pos_range)).collect();
            pin_max(&mut pos, pos_range.1);
            if let Some(l) = leftmost {
                if *l >= 0.0 {
                    return Err(Error::invalid("leftmost eigenvalue must be negative"));
                }
                pin_min(&mut neg, *l);
            }
            let l1 = pos_range.1;
            if neg.iter().any(|v| v.abs() > l1) {
                return Err(Error::invalid("indefinite law violates |lambda_n| <= lambda_1"));
            }
            neg.extend(pos);
            neg.iter_mut().for_each(|v| *v /= l1);
            neg
        }
        EigLaw::Psd { zero_count, pos_range } => {
            check_range("positive", *pos_range)?;
            if *zero_count >= n {
                return Err(Error::invalid(format!("zero count must be below n = {n}, got {zero_count}")));
            }
            if pos_range.0 <= 0.0 {
                return Err(Error::invalid("PSD positive range must be above zero"));
            }
            let mut pos: Vec<f64> = (0..n - zero_count).map(|_| uniform(rng, *pos_range)).collect();
            pin_max(&mut pos, pos_range.1);
            pos.extend(std::iter::repeat_n(0.0, *zero_count));
            pos
        }
        EigLaw::Explicit(v) => {
            if v.len() != n {
                return Err(Error::invalid(format!("explicit spectrum has {} values for n = {n}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("explicit spectrum must be finite"));
            }
            v.clone()
        }
    };
    eig.sort_by(f64::total_cmp);
    let (lo, hi) = (eig[0], eig[n - 1]);
    if lo.abs() > hi.abs() {
        return Err(Error::invalid(format!("spectrum violates |lambda_n| <= |lambda_1| ({lo} vs {hi})")));
    }
    Ok(eig)
}

fn pin_max(v: &mut [f64], value: f64) {
    if let Some(i) = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])) {
        v[i] = value;
    }
}

fn pin_min(v: &mut [f64], value: f64) {
    if let Some(i) = (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])) {
        v[i] = value;
    }
}

/// Random orthogonal matrix: Gram–Schmidt with one re-orthogonalisation pass
/// on the columns of a Gaussian matrix. Columns are stored contiguously in the
/// returned vectors.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= c * qi);
            }
        }
        let nv = dot(&v, &v).sqrt();
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            cols.push(v);
        }
    }
    cols
}

/// Builds `A`, `b` and the ground truth for a spectrum; `λ₁` is attached to
/// the problem when positive.
pub fn gen_problem(spec: &SpectrumSpec, rhs: Rhs) -> Result<(QuadraticProblem, GroundTruth)> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::invalid(format!("problem dimension must be at least 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let eig = draw_spectrum(n, &spec.law, &mut rng)?;

    let (a, q) = match spec.basis {
        Basis::Identity => {
            let desc: Vec<f64> = eig.iter().rev().copied().collect();
            let mut q = DenseMatrix::zeros(n);
            for i in 0..n {
                q.set(n - 1 - i, i, 1.0);
            }
            (DenseMatrix::diagonal(&desc), q)
        }
        Basis::Random => {
            let cols = random_orthogonal(n, &mut rng);
            let mut a = DenseMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let s: f64 = (0..n).map(|k| cols[k][i] * eig[k] * cols[k][j]).sum();
                    a.set(i, j, s);
                    a.set(j, i, s);
                }
            }
            let mut q = DenseMatrix::zeros(n);
            for (k, c) in cols.iter().enumerate() {
                for (r, v) in c.iter().enumerate() {
                    q.set(r, k, *v);
                }
            }
            (a, q)
        }
    };
    let op = SymmetricOperator::from_dense(a)?;
    let (b, x_star) = match rhs {
        Rhs::Zero => (vec![0.0; n], None),
        Rhs::FromSolution(seed) => {
            let x = gen_initial_point(n, seed, PointLaw::StandardGaussian)?;
            (op.matvec(&x)?, Some(x))
        }
    };
    let mut p = QuadraticProblem::new(op, b)?;
    let l1 = eig[n - 1];
    if l1 > 0.0 {
        p = p.with_lambda1(l1)?;
    }
    Ok((p, GroundTruth { eigenvalues: eig, q, x_star }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointLaw {
    StandardGaussian,
    UniformBox(f64, f64),
}

pub fn gen_initial_point(n: usize, seed: u64, law: PointLaw) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match law {
        PointLaw::StandardGaussian => (0..n).map(|_| StandardNormal.sample(&mut rng)).collect(),
        PointLaw::UniformBox(lo, hi) => {
            check_range("box", (lo, hi))?;
            (0..n).map(|_| uniform(&mut rng, (lo, hi))).collect()
        }
    })
}

/// Explicit spectrum with `λ₁ = 2`, `λₙ = −1` and `λ_{n−1} = 2 − 3r`, so that
/// the gap ratio `(λ₁ − λ_{n−1})/(λ₁ − λₙ)` is exactly `r`; remaining values
/// are spread evenly in `[λ_{n−1}, 2]`.
///
/// `λ₁ = 2` keeps `λ_{n−1}` away from zero for the usual ratios (0.5, 0.75,
/// 0.9). A zero eigenvalue has no component in any gradient `Ax` and would
/// hide the second direction; that happens here only at `r = 2/3`.
pub fn gap_ratio_spectrum(n: usize, r: f64) -> Result<Vec<f64>> {
    if n < 3 || !(0.0 < r && r < 1.0) {
        return Err(Error::invalid("need n >= 3 and 0 < r < 1"));
    }
    let top = 2.0;
    let second = top - 3.0 * r;
    let mut v = vec![-1.0, top, second];
    let inner = n - 3;
    for i in 0..inner {
        v.push(second + (top - second) * (i + 1) as f64 / (inner + 1) as f64);
    }
    Ok(v)
}
