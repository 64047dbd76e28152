//! Dense matrix arithmetic, norms, RMS, and small-matrix singular value
//! diagnostics. No external numerics backend; everything is plain `f64`.

mod matrix;
mod svd;

pub use matrix::{rms_closed_form, Matrix, NormOrder};
pub use svd::{pseudo_inverse, singular_values, stable_rank, svd, Svd, SVD_DIM_LIMIT};
