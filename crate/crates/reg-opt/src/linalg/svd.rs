//! Small-matrix singular values via one-sided Jacobi orthogonalization.
//!
//! The routines here are diagnostics and problem-construction helpers; the
//! optimizer step rules never call them. Inputs are restricted to
//! `min(m, n) <= 64`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Largest small-matrix dimension accepted by the singular value routines.
pub const SVD_DIM_LIMIT: usize = 64;

const JACOBI_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 60;

/// Thin singular value decomposition `M = U * diag(sigma) * V^T` with
/// `sigma` nonincreasing. `U` is `m x k`, `V` is `n x k`, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

/// Singular values of `M`, nonincreasing, to about 1e-10 relative accuracy.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    Ok(svd(m)?.sigma)
}

/// Full thin SVD by one-sided Jacobi. The side with fewer lines is
/// orthogonalized, so the cost is `O(k^2 * max(m, n))` per sweep.
pub fn svd(m: &Matrix) -> Result<Svd> {
    let min_dim = m.rows().min(m.cols());
    if min_dim > SVD_DIM_LIMIT {
        return Err(Error::DimensionTooLarge {
            min_dim,
            limit: SVD_DIM_LIMIT,
        });
    }
    if m.rows() >= m.cols() {
        jacobi_tall(m)
    } else {
        // Decompose the transpose and swap the factors.
        let t = jacobi_tall(&m.transpose())?;
        Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        })
    }
}

/// One-sided Jacobi on a tall (or square) matrix: rotate column pairs until
/// all columns are mutually orthogonal, then read off `sigma` as the column
/// norms.
fn jacobi_tall(m: &Matrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    debug_assert!(rows >= cols);

    // Column-major working copy of A and accumulated V.
    let mut a: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let (mut aii, mut ajj, mut aij) = (0.0, 0.0, 0.0);
                for r in 0..rows {
                    aii += a[i][r] * a[i][r];
                    ajj += a[j][r] * a[j][r];
                    aij += a[i][r] * a[j][r];
                }
                if aij.abs() <= JACOBI_TOL * (aii * ajj).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (ajj - aii) / (2.0 * aij);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let (x, y) = (a[i][r], a[j][r]);
                    a[i][r] = c * x - s * y;
                    a[j][r] = s * x + c * y;
                }
                for r in 0..cols {
                    let (x, y) = (v[i][r], v[j][r]);
                    v[i][r] = c * x - s * y;
                    v[j][r] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let mut u = Matrix::zeros(rows, cols);
    let mut vm = Matrix::zeros(m.cols(), cols);
    let mut sigma = Vec::with_capacity(cols);
    for (k, &j) in order.iter().enumerate() {
        let norm = norms[j];
        sigma.push(norm);
        if norm > 0.0 {
            for r in 0..rows {
                u.set(r, k, a[j][r] / norm);
            }
        }
        for r in 0..cols {
            vm.set(r, k, v[j][r]);
        }
    }
    Ok(Svd { u, sigma, v: vm })
}

/// Moore-Penrose pseudoinverse, truncating singular values below
/// `1e-12 * sigma_max`.
pub fn pseudo_inverse(m: &Matrix) -> Result<Matrix> {
    let dec = svd(m)?;
    let cutoff = 1e-12 * dec.sigma.first().copied().unwrap_or(0.0);
    // pinv = V * diag(1/sigma) * U^T
    let mut scaled_v = dec.v.clone();
    for (idx, &s) in dec.sigma.iter().enumerate() {
        let inv = if s > cutoff { 1.0 / s } else { 0.0 };
        for r in 0..scaled_v.rows() {
            let val = scaled_v.get(r, idx) * inv;
            scaled_v.set(r, idx, val);
        }
    }
    scaled_v.matmul(&dec.u.transpose())
}

/// Stable rank `||M||_F^2 / sigma_max^2`, at least 1 for nonzero matrices.
pub fn stable_rank(m: &Matrix) -> Result<f64> {
    let sigma = singular_values(m)?;
    let smax = sigma[0];
    if smax == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let fro = m.frobenius_norm();
    Ok((fro / smax).powi(2))
}
