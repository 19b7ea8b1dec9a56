//! Symmetric Lanczos with full reorthogonalization, for the largest
//! eigenpairs of a real symmetric operator given matrix-free.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LanczosError {
    #[error("requested {want} eigenpairs from an operator of dimension {dim}")]
    TooManyRequested { want: usize, dim: usize },
    #[error("no convergence for {want} eigenpairs within {iters} iterations")]
    NoConvergence { want: usize, iters: usize },
}

/// Real symmetric operator.
pub trait SymOp {
    fn dim(&self) -> usize;
    /// y = A x.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Largest `want` eigenvalues (by value, descending) of a symmetric
/// operator, with eigenvectors. `tol` bounds the residual ‖Av − λv‖
/// relative to the largest Ritz value magnitude.
///
/// Full reorthogonalization keeps the basis numerically orthogonal, so
/// memory grows with the iteration count; intended for a modest number of
/// extremal pairs.
pub fn lanczos_symmetric(
    op: &dyn SymOp,
    want: usize,
    tol: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), LanczosError> {
    let n = op.dim();
    if want > n {
        return Err(LanczosError::TooManyRequested { want, dim: n });
    }
    if want == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let max_m = n.min((12 * want + 80).max(120));

    // Deterministic start vector from a tiny splitmix-style hash.
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    let mut next = || {
        state ^= state >> 30;
        state = state.wrapping_mul(0xBF58476D1CE4E5B9);
        state ^= state >> 27;
        state = state.wrapping_mul(0x94D049BB133111EB);
        state ^= state >> 31;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut q0: Vec<f64> = (0..n).map(|_| next()).collect();
    normalize_real(&mut q0);

    let mut basis: Vec<Vec<f64>> = vec![q0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0f64; n];

    for m in 1..=max_m {
        let q = basis.last().expect("basis nonempty").clone();
        op.apply(&q, &mut w);
        let alpha: f64 = dot_real(&q, &w);
        alphas.push(alpha);
        for i in 0..n {
            w[i] -= alpha * q[i];
        }
        if let Some(prev) = basis.len().checked_sub(2).map(|ix| &basis[ix]) {
            let beta_prev = betas[betas.len() - 1];
            for i in 0..n {
                w[i] -= beta_prev * prev[i];
            }
        }
        // Full reorthogonalization, twice for safety.
        for _ in 0..2 {
            for qv in &basis {
                let proj = dot_real(qv, &w);
                if proj != 0.0 {
                    for i in 0..n {
                        w[i] -= proj * qv[i];
                    }
                }
            }
        }
        let beta = dot_real(&w, &w).sqrt();

        // Ritz check on the tridiagonal every few steps once rich enough.
        if m >= want && (m % 4 == 0 || m == max_m || beta == 0.0) {
            let (evals, evecs) = tridiag_eigen(&alphas, &betas);
            // Largest first.
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| evals[b].partial_cmp(&evals[a]).unwrap());
            let scale = evals
                .iter()
                .map(|v| v.abs())
                .fold(0.0f64, f64::max)
                .max(f64::MIN_POSITIVE);
            let converged = order
                .iter()
                .take(want)
                .all(|&ix| beta * evecs[ix][m - 1].abs() <= tol * scale);
            if converged || beta == 0.0 {
                let mut vals = Vec::with_capacity(want);
                let mut vecs = Vec::with_capacity(want);
                for &ix in order.iter().take(want) {
                    vals.push(evals[ix]);
                    let mut v = vec![0.0f64; n];
                    for (s, qv) in evecs[ix].iter().zip(&basis) {
                        if *s != 0.0 {
                            for i in 0..n {
                                v[i] += s * qv[i];
                            }
                        }
                    }
                    normalize_real(&mut v);
                    vecs.push(v);
                }
                return Ok((vals, vecs));
            }
        }

        if beta == 0.0 {
            // Invariant subspace smaller than requested and not converged.
            return Err(LanczosError::NoConvergence { want, iters: m });
        }
        if m < max_m {
            betas.push(beta);
            let qnext: Vec<f64> = w.iter().map(|x| x / beta).collect();
            basis.push(qnext);
        }
    }
    Err(LanczosError::NoConvergence {
        want,
        iters: max_m,
    })
}

fn dot_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize_real(v: &mut [f64]) {
    let n = dot_real(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Eigen decomposition of a symmetric tridiagonal matrix by the implicit
/// QL method with Wilkinson shifts, eigenvectors included. Classic tql2.
fn tridiag_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = alphas.len();
    let mut d = alphas.to_vec();
    let mut e = vec![0.0f64; m];
    e[..m - 1].copy_from_slice(&betas[..m.saturating_sub(1)]);
    // Eigenvector accumulation starts at identity; z[col][row].
    let mut z: Vec<Vec<f64>> = (0..m)
        .map(|c| (0..m).map(|r| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();

    for l in 0..m {
        let mut iter = 0;
        loop {
            // Find a small off-diagonal to split at.
            let mut msplit = l;
            while msplit < m - 1 {
                let dd = d[msplit].abs() + d[msplit + 1].abs();
                if e[msplit].abs() <= f64::EPSILON * dd {
                    break;
                }
                msplit += 1;
            }
            if msplit == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r } else { -r };
            g = d[msplit] - d[l] + e[l] / (g + sign_r);
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut broke_early = false;
            for i in (l..msplit).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[msplit] = 0.0;
                    broke_early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for zr in z.iter_mut() {
                    f = zr[i + 1];
                    zr[i + 1] = s * zr[i] + c * f;
                    zr[i] = c * zr[i] - s * f;
                }
            }
            if broke_early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[msplit] = 0.0;
        }
    }

    // Transpose storage to eigenvector-per-entry.
    let vecs: Vec<Vec<f64>> = (0..m)
        .map(|col| (0..m).map(|row| z[row][col]).collect())
        .collect();
    (d, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct DenseSym(Vec<Vec<f64>>);

    impl SymOp for DenseSym {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for (i, row) in self.0.iter().enumerate() {
                y[i] = dot_real(row, x);
            }
        }
    }

    fn random_sym(n: usize, seed: u64) -> DenseSym {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = rng.random::<f64>() - 0.5;
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        DenseSym(m)
    }

    #[test]
    fn tridiagonal_eigen_on_known_matrix() {
        // T = [[2,1],[1,2]]: eigenvalues 1 and 3.
        let (mut d, _) = tridiag_eigen(&[2.0, 2.0], &[1.0]);
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((d[0] - 1.0).abs() < 1e-12);
        assert!((d[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_operator_top_pairs() {
        let n = 30;
        let mut m = vec![vec![0.0f64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = i as f64;
        }
        let (vals, vecs) = lanczos_symmetric(&DenseSym(m), 3, 1e-10, 1).unwrap();
        assert!((vals[0] - 29.0).abs() < 1e-8);
        assert!((vals[1] - 28.0).abs() < 1e-8);
        assert!((vals[2] - 27.0).abs() < 1e-8);
        assert!(vecs[0][29].abs() > 0.999);
    }

    #[test]
    fn random_operator_matches_dense_oracle() {
        let n = 40;
        let op = random_sym(n, 9);
        let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| op.0[i][j]);
        let mut oracle: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        oracle.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let (vals, vecs) = lanczos_symmetric(&op, 4, 1e-10, 3).unwrap();
        for i in 0..4 {
            assert!((vals[i] - oracle[i]).abs() < 1e-8, "{} vs {}", vals[i], oracle[i]);
        }
        // Residual check.
        let mut y = vec![0.0f64; n];
        for (v, val) in vecs.iter().zip(&vals) {
            op.apply(v, &mut y);
            let resid: f64 = y
                .iter()
                .zip(v)
                .map(|(a, b)| (a - val * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(resid < 1e-8, "residual {resid}");
        }
    }

    #[test]
    fn request_too_many_fails() {
        let op = random_sym(5, 1);
        assert_eq!(
            lanczos_symmetric(&op, 6, 1e-8, 0).unwrap_err(),
            LanczosError::TooManyRequested { want: 6, dim: 5 }
        );
    }
}
