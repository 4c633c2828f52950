//! Sparse/dense kernels shared by the other modules: CSR storage and
//! mat-vec, BiCGStab, the 2x2 block operator of the Newton system, dense
//! oracles, and least-squares regression.

mod bicgstab;
mod csr;
pub mod dense;
mod ops;
mod regression;

pub use bicgstab::{bicgstab, bicgstab_detailed, BicgstabOutcome};
pub use csr::CsrMatrix;
pub use ops::{BlockOperator, JacobiScaledOp, LinearOp};
pub use regression::{linear_regression, loglog_regression, Regression};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// y += alpha * x
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
