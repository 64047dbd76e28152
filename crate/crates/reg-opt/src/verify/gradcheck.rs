//! Central-difference gradient audits for the test objectives.

use serde::Serialize;

use crate::linalg::Matrix;
use crate::problems::GroupedObjective;
use crate::verify::derive_seed;

/// Numerical gradients of every parameter group by central differences.
pub fn central_difference_grads(
    obj: &dyn GroupedObjective,
    params: &[Matrix],
    step: f64,
) -> Vec<Matrix> {
    let mut work: Vec<Matrix> = params.to_vec();
    let mut out = Vec::with_capacity(params.len());
    for g in 0..params.len() {
        let (rows, cols) = params[g].shape();
        let mut grad = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let base = params[g].get(i, j);
                work[g].set(i, j, base + step);
                let plus = obj.eval(&work);
                work[g].set(i, j, base - step);
                let minus = obj.eval(&work);
                work[g].set(i, j, base);
                grad.set(i, j, (plus - minus) / (2.0 * step));
            }
        }
        out.push(grad);
    }
    out
}

/// Result of auditing analytic gradients against central differences at a
/// set of seeded random points.
#[derive(Debug, Clone, Serialize)]
pub struct GradAudit {
    pub problem: String,
    pub points: usize,
    pub step: f64,
    pub tol: f64,
    pub max_rel_error: f64,
    pub passed: bool,
}

/// Compare analytic and numerical gradients at `points` seeded starting
/// points; the reported error is the worst Frobenius-relative deviation
/// over all points and parameter groups.
pub fn finite_diff_gradient_audit(
    obj: &dyn GroupedObjective,
    points: usize,
    step: f64,
    tol: f64,
    seed: u64,
) -> GradAudit {
    let mut max_rel_error: f64 = 0.0;
    for point in 0..points {
        let params = obj.init(derive_seed(seed, point as u64));
        let analytic = obj.grads(&params);
        let numeric = central_difference_grads(obj, &params, step);
        for (a, n) in analytic.iter().zip(&numeric) {
            let denom = a.frobenius_norm().max(1e-12);
            let rel = a.sub(n).expect("audit shapes agree").frobenius_norm() / denom;
            max_rel_error = max_rel_error.max(rel);
        }
    }
    GradAudit {
        problem: obj.name().to_string(),
        points,
        step,
        tol,
        max_rel_error,
        passed: max_rel_error < tol,
    }
}
