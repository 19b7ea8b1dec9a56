//! Inverse iteration against (B − λI) for a single eigenvector once the
//! eigenvalue is known. The same factorization serves both sides: solving
//! with the adjoint of (B − λI) drives convergence to the left vector.

use num_complex::Complex64;

use crate::graph::TransitionMatrix;
use crate::linalg::{self, CscMatrix, SparseLu};

use super::{apply_b, apply_bt, SolverConfig};

const MAX_ITERS: usize = 50;
const MAX_REFACTOR: usize = 3;

/// splitmix64 stream, the deterministic start vector source.
fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

pub(super) fn start_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut state = seed ^ 0x5851f42d4c957f2d;
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| {
            let re = (splitmix(&mut state) >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            let im = (splitmix(&mut state) >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            Complex64::new(re, im)
        })
        .collect();
    linalg::normalize(&mut v);
    v
}

/// CSC form of (B − λI).
pub(super) fn shifted_matrix(b: &TransitionMatrix, lambda: Complex64) -> CscMatrix {
    let g = b.graph();
    let n = g.n();
    let mut triplets = Vec::with_capacity(g.m() + n);
    for i in 0..n {
        for (j, w) in b.row(i) {
            triplets.push((i, j, Complex64::new(w, 0.0)));
        }
        triplets.push((i, i, -lambda));
    }
    CscMatrix::from_triplets(n, &triplets)
}

/// Residual of the candidate pair on the requested side.
pub(super) fn side_residual(
    b: &TransitionMatrix,
    lambda: Complex64,
    v: &[Complex64],
    left: bool,
) -> f64 {
    let mut work = vec![Complex64::ZERO; v.len()];
    if left {
        apply_bt(b, v, &mut work);
        work.iter()
            .zip(v)
            .map(|(w, vi)| (w - lambda.conj() * vi).norm_sqr())
            .sum::<f64>()
            .sqrt()
    } else {
        apply_b(b, v, &mut work);
        work.iter()
            .zip(v)
            .map(|(w, vi)| (w - lambda * vi).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Rayleigh quotient v*Bv for a unit vector, on either side. For the left
/// side the quotient of Bᴴ is conjugated back into B's spectrum.
pub(super) fn rayleigh(b: &TransitionMatrix, v: &[Complex64], left: bool) -> Complex64 {
    let mut work = vec![Complex64::ZERO; v.len()];
    if left {
        apply_bt(b, v, &mut work);
        linalg::cdot(v, &work).conj()
    } else {
        apply_b(b, v, &mut work);
        linalg::cdot(v, &work)
    }
}

/// Inverse iteration for one eigenvector of B at eigenvalue λ.
///
/// `left` selects the left eigenvector (y*B = λy*, stored as y). Returns
/// (unit vector, residual on its side, refined eigenvalue). A stalled
/// iteration falls back to Rayleigh quotient refinement with a fresh
/// factorization, up to a small number of shifts.
pub(super) fn eigenvector(
    b: &TransitionMatrix,
    lambda: Complex64,
    left: bool,
    config: &SolverConfig,
) -> (Vec<Complex64>, f64, Complex64) {
    let n = b.n();
    let mut shift = lambda;
    let mut v = start_vector(n, config.seed ^ if left { 0x6c65 } else { 0x7269 });
    let mut best_v = v.clone();
    let mut best_resid = f64::MAX;
    let mut best_lambda = lambda;

    for round in 0..=MAX_REFACTOR {
        let lu = SparseLu::factor(&shifted_matrix(b, shift));
        for _ in 0..MAX_ITERS {
            if left {
                lu.solve_adjoint(&mut v);
            } else {
                lu.solve(&mut v);
            }
            let norm = linalg::normalize(&mut v);
            if !norm.is_finite() || norm == 0.0 {
                v = start_vector(n, config.seed.wrapping_add(round as u64 + 1));
                continue;
            }
            let mu = rayleigh(b, &v, left);
            let resid = side_residual(b, mu, &v, left);
            if resid < best_resid {
                best_resid = resid;
                best_v = v.clone();
                best_lambda = mu;
            }
            if resid <= config.tol * 0.1 {
                return (best_v, best_resid, best_lambda);
            }
        }
        if best_resid <= config.tol {
            break;
        }
        // Rayleigh shift for the next factorization.
        shift = best_lambda;
        v = best_v.clone();
    }
    (best_v, best_resid, best_lambda)
}
