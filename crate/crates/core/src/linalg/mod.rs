//! Numerical kernels: dense complex eigenvalues, sparse complex LU,
//! symmetric Lanczos, and an assignment solver.
//!
//! Everything here is deterministic. Dense routines use nalgebra matrices
//! for storage only; the algorithms are local to this module.

mod dense;
mod hungarian;
mod lanczos;
mod sparse;

pub use dense::{eigenvalues, schur, triangular_eigenvectors, DenseEigError};
pub use hungarian::min_cost_assignment;
pub use lanczos::{lanczos_symmetric, LanczosError, SymOp};
pub use sparse::{CscMatrix, SparseLu};

use num_complex::Complex64;

/// 2-norm of a complex vector.
pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Conjugated dot product `a* b`.
pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Scales `v` to unit 2-norm in place; leaves zero vectors alone.
pub fn normalize(v: &mut [Complex64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        let inv = 1.0 / n;
        v.iter_mut().for_each(|z| *z *= inv);
    }
    n
}
