//! Row-and-column scaling: the single-pass `l_p` line normalization
//! operator, its alternating iterated form, the kappa imbalance measures,
//! and 1-norm row equilibration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{singular_values, Matrix, NormOrder};

/// Which lines of the matrix a normalization pass rescales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Rows,
    Cols,
}

/// Axis selection rule for the single-pass normalization.
///
/// `ShapeDriven` picks rows when `m <= n` (ties go to rows) and columns
/// otherwise, so the cheaper side is always the one scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormAxisPolicy {
    ShapeDriven,
    ForceRows,
    ForceCols,
}

impl Default for NormAxisPolicy {
    fn default() -> Self {
        NormAxisPolicy::ShapeDriven
    }
}

impl NormAxisPolicy {
    pub fn axis(&self, rows: usize, cols: usize) -> Axis {
        match self {
            NormAxisPolicy::ShapeDriven => {
                if rows <= cols {
                    Axis::Rows
                } else {
                    Axis::Cols
                }
            }
            NormAxisPolicy::ForceRows => Axis::Rows,
            NormAxisPolicy::ForceCols => Axis::Cols,
        }
    }
}

/// Single-pass line normalization: divide each row (or column) by its `l_p`
/// norm. Zero lines pass through unchanged.
pub fn normalize(m: &Matrix, p: NormOrder, policy: NormAxisPolicy) -> Matrix {
    match policy.axis(m.rows(), m.cols()) {
        Axis::Rows => {
            let mut out = m.clone();
            for i in 0..m.rows() {
                let norm = m.row_norm(i, p);
                if norm > 0.0 {
                    for x in out.row_mut(i) {
                        *x /= norm;
                    }
                }
            }
            out
        }
        Axis::Cols => normalize(&m.transpose(), p, NormAxisPolicy::ForceRows).transpose(),
    }
}

/// `t` alternating passes of row normalization followed by column
/// normalization. Unlike [`normalize`], a zero line anywhere in the loop is
/// an error: the alternating scheme has no passthrough convention.
pub fn racs_iterate(m: &Matrix, p: NormOrder, t: usize) -> Result<Matrix> {
    if t < 1 {
        return Err(Error::ConfigInvalid(
            "normalization iteration count t must be >= 1".into(),
        ));
    }
    let mut cur = m.clone();
    for step in 0..t {
        for i in 0..cur.rows() {
            let norm = cur.row_norm(i, p);
            if norm == 0.0 {
                return Err(Error::ZeroLineEncountered {
                    step,
                    axis: Axis::Rows,
                    index: i,
                });
            }
            for x in cur.row_mut(i) {
                *x /= norm;
            }
        }
        for j in 0..cur.cols() {
            let norm = cur.col_norm(j, p);
            if norm == 0.0 {
                return Err(Error::ZeroLineEncountered {
                    step,
                    axis: Axis::Cols,
                    index: j,
                });
            }
            for i in 0..cur.rows() {
                let v = cur.get(i, j) / norm;
                cur.set(i, j, v);
            }
        }
    }
    Ok(cur)
}

/// The reference norm in the denominator (or inverse factor) of a kappa
/// measure: Frobenius, or an operator norm induced by `l_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarNorm {
    Frobenius,
    Holder(HolderOrder),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolderOrder {
    One,
    Two,
    Inf,
}

/// Imbalance measure family. The three variants are:
/// - `InfOverStar`: `||M||_inf / ||M||*`, minimized over left diagonal
///   scalings by equal row 1-norms;
/// - `OneOverStar`: `||M||_1 / ||M||*`, minimized over right diagonal
///   scalings by equal column 1-norms;
/// - `MaxEntryInvStar`: `max_ij |M_ij| * ||M^-1||*` (square invertible
///   matrices), minimized by equal row (left) or column (right) inf-norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaVariant {
    InfOverStar,
    OneOverStar,
    MaxEntryInvStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaKind {
    pub variant: KappaVariant,
    pub star: StarNorm,
}

/// Operator infinity norm: maximum row 1-norm.
pub fn operator_inf_norm(m: &Matrix) -> f64 {
    (0..m.rows())
        .map(|i| m.row_norm(i, NormOrder::L1))
        .fold(0.0, f64::max)
}

/// Operator 1-norm: maximum column 1-norm.
pub fn operator_one_norm(m: &Matrix) -> f64 {
    (0..m.cols())
        .map(|j| m.col_norm(j, NormOrder::L1))
        .fold(0.0, f64::max)
}

fn star_norm(m: &Matrix, star: StarNorm) -> Result<f64> {
    Ok(match star {
        StarNorm::Frobenius => m.frobenius_norm(),
        StarNorm::Holder(HolderOrder::One) => operator_one_norm(m),
        StarNorm::Holder(HolderOrder::Inf) => operator_inf_norm(m),
        StarNorm::Holder(HolderOrder::Two) => singular_values(m)?[0],
    })
}

/// Evaluate the chosen kappa imbalance measure of a nonzero matrix.
pub fn kappa(m: &Matrix, kind: KappaKind) -> Result<f64> {
    if m.max_abs() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    match kind.variant {
        KappaVariant::InfOverStar => Ok(operator_inf_norm(m) / star_norm(m, kind.star)?),
        KappaVariant::OneOverStar => Ok(operator_one_norm(m) / star_norm(m, kind.star)?),
        KappaVariant::MaxEntryInvStar => {
            let inv = m.inverse()?;
            Ok(m.max_abs() * star_norm(&inv, kind.star)?)
        }
    }
}

/// Left diagonal scaling that gives every row 1-norm exactly 1. Returns the
/// diagonal as a vector together with the scaled matrix.
pub fn equilibrate_rows_1norm(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let mut diag = Vec::with_capacity(m.rows());
    let mut out = m.clone();
    for i in 0..m.rows() {
        let norm = m.row_norm(i, NormOrder::L1);
        if norm == 0.0 {
            return Err(Error::ZeroRow { index: i });
        }
        let d = 1.0 / norm;
        diag.push(d);
        for x in out.row_mut(i) {
            *x *= d;
        }
    }
    Ok((diag, out))
}
