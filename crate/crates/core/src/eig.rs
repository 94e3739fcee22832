//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! This is the verification oracle: it shares no code with the power-method
//! machinery it is used to check.

use crate::error::{Error, Result};
use crate::linops::{DenseMatrix, SymmetricOperator, DENSE_LIMIT};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Eigenvector `i` (same index as `values[i]`).
    pub fn vector(&self, i: usize) -> Vec<f64> {
        let n = self.n();
        (0..n).map(|r| self.vectors.get(r, i)).collect()
    }

    /// Smallest eigenvalue and its eigenvector.
    pub fn leftmost(&self) -> (f64, Vec<f64>) {
        (self.values[0], self.vector(0))
    }

    /// Largest eigenvalue and its eigenvector.
    pub fn rightmost(&self) -> (f64, Vec<f64>) {
        let last = self.n() - 1;
        (self.values[last], self.vector(last))
    }

    /// `‖AV − VΛ‖_F`.
    pub fn residual(&self, a: &DenseMatrix) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for j in 0..n {
            let v = self.vector(j);
            for i in 0..n {
                let av: f64 = a.row(i).iter().zip(&v).map(|(x, y)| x * y).sum();
                let r = av - self.values[j] * v[i];
                acc += r * r;
            }
        }
        acc.sqrt()
    }

    /// `‖VᵀV − I‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for i in 0..n {
            let vi = self.vector(i);
            for j in 0..n {
                let vj = self.vector(j);
                let d: f64 = vi.iter().zip(&vj).map(|(x, y)| x * y).sum::<f64>() - if i == j { 1.0 } else { 0.0 };
                acc += d * d;
            }
        }
        acc.sqrt()
    }
}

/// Full eigen-decomposition of a symmetric operator by cyclic Jacobi
/// rotations. Uses the dense backing when present, otherwise densifies with
/// `n` products.
pub fn dense_eig_oracle(op: &SymmetricOperator) -> Result<EigenDecomposition> {
    if op.dim() > DENSE_LIMIT {
        return Err(Error::invalid(format!(
            "dense eigensolver limited to n <= {DENSE_LIMIT}, got {}",
            op.dim()
        )));
    }
    jacobi_eigen(&op.to_dense())
}

pub fn jacobi_eigen(a: &DenseMatrix) -> Result<EigenDecomposition> {
    let n = a.n();
    let scale = a.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let asym = a.max_asymmetry();
    if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NonSymmetric { max_asymmetry: asym });
    }

    // symmetrize exactly so rounding in the input cannot bias the rotations
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = 0.5 * (a.get(i, j) + a.get(j, i));
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let fro: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = f64::EPSILON * fro;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                // skip entries already negligible next to both diagonals
                if apq.abs() <= 1e-18 * (app.abs() + aqq.abs()) {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // columns: M ← M J
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                // rows: M ← Jᵀ M
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = DenseMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v[r * n + old_col]);
        }
    }
    Ok(EigenDecomposition { values, vectors })
}
