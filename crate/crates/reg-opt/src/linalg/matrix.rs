//! Dense row-major matrices over `f64` with the norm and RMS helpers the
//! optimizers are built on.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vector norm order used for row/column normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormOrder {
    #[serde(rename = "1")]
    L1,
    #[serde(rename = "2")]
    L2,
    #[serde(rename = "inf")]
    LInf,
}

impl NormOrder {
    /// Norm of a vector given as a strided view (`stride` = 1 for rows).
    fn eval_strided(&self, data: &[f64], start: usize, stride: usize, len: usize) -> f64 {
        let mut it = (0..len).map(|k| data[start + k * stride]);
        match self {
            NormOrder::L1 => it.map(f64::abs).sum(),
            NormOrder::L2 => it.map(|x| x * x).sum::<f64>().sqrt(),
            NormOrder::LInf => it.by_ref().map(f64::abs).fold(0.0, f64::max),
        }
    }

    /// Norm of a contiguous vector.
    pub fn vector_norm(&self, v: &[f64]) -> f64 {
        self.eval_strided(v, 0, 1, v.len())
    }
}

impl std::fmt::Display for NormOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormOrder::L1 => write!(f, "1"),
            NormOrder::L2 => write!(f, "2"),
            NormOrder::LInf => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for NormOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(NormOrder::L1),
            "2" => Ok(NormOrder::L2),
            "inf" | "Inf" | "INF" => Ok(NormOrder::LInf),
            other => Err(Error::ConfigInvalid(format!(
                "unknown norm order '{other}' (expected 1, 2 or inf)"
            ))),
        }
    }
}

/// Dense `m x n` matrix of finite 64-bit floats, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Build from row-major data. Panics on empty dimensions, a length
    /// mismatch, or non-finite entries; those are programming errors, not
    /// runtime conditions.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        assert_eq!(data.len(), rows * cols, "data length must equal rows*cols");
        assert!(
            data.iter().all(|x| x.is_finite()),
            "matrix entries must be finite"
        );
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        assert!(!rows.is_empty(), "need at least one row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.iter().flatten().copied().collect();
        Matrix::new(rows.len(), cols, data)
    }

    /// Matrix with i.i.d. standard normal entries drawn from `rng`.
    pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        Matrix::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    /// Contiguous view of row `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix::new(self.rows, self.cols, self.data.iter().map(|&x| f(x)).collect())
    }

    pub fn scale(&self, c: f64) -> Matrix {
        self.map(|x| c * x)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b, "matrix addition")
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b, "matrix subtraction")
    }

    fn zip_with(
        &self,
        other: &Matrix,
        f: impl Fn(f64, f64) -> f64,
        ctx: &'static str,
    ) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::shape(self.shape(), other.shape(), ctx));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Matrix::new(self.rows, self.cols, data))
    }

    /// `self += c * other`, in place.
    pub fn axpy(&mut self, c: f64, other: &Matrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::shape(self.shape(), other.shape(), "axpy"));
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::shape(
                (self.cols, self.cols),
                (other.rows, other.cols),
                "matrix product inner dimension",
            ));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let lhs = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(lhs) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Frobenius inner product `<self, other> = sum_ij a_ij b_ij`.
    pub fn frobenius_inner(&self, other: &Matrix) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::shape(self.shape(), other.shape(), "inner product"));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a * b)
            .sum())
    }

    /// `l_p` norm of row `i`. A zero row returns 0.
    pub fn row_norm(&self, i: usize, p: NormOrder) -> f64 {
        assert!(i < self.rows, "row index out of bounds");
        p.eval_strided(&self.data, i * self.cols, 1, self.cols)
    }

    /// `l_p` norm of column `j`. A zero column returns 0.
    pub fn col_norm(&self, j: usize, p: NormOrder) -> f64 {
        assert!(j < self.cols, "column index out of bounds");
        p.eval_strided(&self.data, j, self.cols, self.rows)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Root mean square entry: `frobenius_norm / sqrt(m*n)`.
    pub fn rms(&self) -> f64 {
        self.frobenius_norm() / ((self.rows * self.cols) as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Largest absolute entrywise difference; shapes must agree.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Sum over rows of the row `l2` norms. This is the convergence
    /// surrogate tracked by the momentum bound check.
    pub fn row_l2_sum(&self) -> f64 {
        (0..self.rows).map(|i| self.row_norm(i, NormOrder::L2)).sum()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::shape(
                (self.rows, self.rows),
                self.shape(),
                "inverse needs a square matrix",
            ));
        }
        let n = self.rows;
        let scale = self.max_abs();
        if scale == 0.0 {
            return Err(Error::SingularMatrix);
        }
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r1, &r2| {
                    a[r1 * n + col]
                        .abs()
                        .total_cmp(&a[r2 * n + col].abs())
                })
                .unwrap();
            let pivot = a[pivot_row * n + col];
            if pivot.abs() < 1e-12 * scale {
                return Err(Error::SingularMatrix);
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                    inv.swap(col * n + j, pivot_row * n + j);
                }
            }
            let inv_pivot = 1.0 / a[col * n + col];
            for j in 0..n {
                a[col * n + j] *= inv_pivot;
                inv[col * n + j] *= inv_pivot;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= factor * a[col * n + j];
                    inv[r * n + j] -= factor * inv[col * n + j];
                }
            }
        }
        Ok(Matrix::new(n, n, inv))
    }

    /// Serialize as the text fixture format: a `"m n"` header line, then one
    /// line per row with entries at 17 significant digits (round-trip exact).
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Matrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::ConfigInvalid("empty matrix text".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::ConfigInvalid(format!("bad dimension '{t}'")))
            })
            .collect::<Result<_>>()?;
        if dims.len() != 2 || dims[0] == 0 || dims[1] == 0 {
            return Err(Error::ConfigInvalid(format!(
                "matrix header must be 'm n' with positive dims, got '{header}'"
            )));
        }
        let (rows, cols) = (dims[0], dims[1]);
        let mut data = Vec::with_capacity(rows * cols);
        for (i, line) in lines.enumerate() {
            if i >= rows {
                return Err(Error::ConfigInvalid("too many matrix rows".into()));
            }
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::ConfigInvalid(format!("bad entry '{tok}'")))?;
                if !v.is_finite() {
                    return Err(Error::ConfigInvalid(format!("non-finite entry '{tok}'")));
                }
                data.push(v);
            }
        }
        if data.len() != rows * cols {
            return Err(Error::ConfigInvalid(format!(
                "expected {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix::new(rows, cols, data))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

/// RMS of an `l2` row- or column-normalized matrix, in closed form:
/// `sqrt(1 / max(m, n))`.
pub fn rms_closed_form(m: usize, n: usize) -> f64 {
    assert!(m >= 1 && n >= 1, "dimensions must be >= 1");
    (1.0 / m.max(n) as f64).sqrt()
}
