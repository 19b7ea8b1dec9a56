//! Dense nonsymmetric eigenvalue computation in complex arithmetic:
//! balancing, Householder reduction to Hessenberg form, and a shifted QR
//! iteration with deflation. Follows the classical EISPACK/LAPACK scheme
//! (single Wilkinson shift, exceptional shift every tenth stalled sweep).

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DenseEigError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("QR iteration failed to converge after {0} sweeps")]
    NoConvergence(usize),
}

const EPS: f64 = f64::EPSILON;

/// All eigenvalues of a general complex matrix, in deflation order
/// (no particular sorting).
pub fn eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>, DenseEigError> {
    if a.nrows() != a.ncols() {
        return Err(DenseEigError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h, None);
    let mut q = None;
    qr_iterate(&mut h, &mut q)?;
    Ok((0..n).map(|i| h[(i, i)]).collect())
}

/// Schur decomposition A = Q T Q* with T upper triangular.
///
/// No balancing, so Q stays unitary. Intended for small, well-scaled
/// matrices (projected Hessenberg blocks and the like).
pub fn schur(
    a: &DMatrix<Complex64>,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>), DenseEigError> {
    if a.nrows() != a.ncols() {
        return Err(DenseEigError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    let mut t = a.clone();
    let mut q = DMatrix::identity(n, n);
    hessenberg(&mut t, Some(&mut q));
    let mut qopt = Some(&mut q);
    qr_iterate(&mut t, &mut qopt)?;
    Ok((q, t))
}

/// Eigenvectors of A = Q T Q* by back-substitution on the triangular
/// factor. Returns unit eigenvectors in the original basis, one per
/// diagonal entry of T, in diagonal order.
pub fn triangular_eigenvectors(
    q: &DMatrix<Complex64>,
    t: &DMatrix<Complex64>,
) -> Vec<Vec<Complex64>> {
    let n = t.nrows();
    let tnorm = t.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(EPS);
    let mut out = Vec::with_capacity(n);
    for ix in 0..n {
        let lambda = t[(ix, ix)];
        let mut w = vec![Complex64::ZERO; n];
        w[ix] = Complex64::ONE;
        for j in (0..ix).rev() {
            let mut s = Complex64::ZERO;
            for l in (j + 1)..=ix {
                s += t[(j, l)] * w[l];
            }
            let mut d = t[(j, j)] - lambda;
            // Guard repeated eigenvalues; a perturbed pivot yields the
            // usual approximate invariant direction.
            if d.norm() < EPS * tnorm {
                d = Complex64::new(EPS * tnorm, 0.0);
            }
            w[j] = -s / d;
        }
        let mut v = vec![Complex64::ZERO; n];
        for (j, &wj) in w.iter().enumerate().take(ix + 1) {
            if wj != Complex64::ZERO {
                for i in 0..n {
                    v[i] += q[(i, j)] * wj;
                }
            }
        }
        super::normalize(&mut v);
        out.push(v);
    }
    out
}

/// Diagonal similarity scaling by powers of two to even out row and
/// column norms. Affects eigenvalue accuracy only, not the values.
fn balance(a: &mut DMatrix<Complex64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| a[(j, i)].norm()).sum();
            let mut r: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / radix {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if (c + r) < 0.95 * s && f != 1.0 {
                converged = false;
                let g = 1.0 / f;
                for j in 0..n {
                    let v = a[(i, j)] * g;
                    a[(i, j)] = v;
                }
                for j in 0..n {
                    let v = a[(j, i)] * f;
                    a[(j, i)] = v;
                }
            }
        }
        if converged {
            return;
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place. When `q` is
/// given it accumulates the transform: on entry Q (usually I), on exit
/// Q·P₀·P₁···, so that A_in = Q H Q*.
fn hessenberg(a: &mut DMatrix<Complex64>, mut q: Option<&mut DMatrix<Complex64>>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let mut u = vec![Complex64::ZERO; n];
    for k in 0..n - 2 {
        let normx = {
            let mut s = 0.0;
            for i in k + 1..n {
                s += a[(i, k)].norm_sqr();
            }
            s.sqrt()
        };
        if normx == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::ONE
        } else {
            x0 / x0.norm()
        };
        let beta = -phase * normx;
        // u = x - beta e1, P = I - 2 u u* / |u|^2 maps x to beta e1.
        let mut unorm2 = 0.0;
        for i in k + 1..n {
            let ui = if i == k + 1 { a[(i, k)] - beta } else { a[(i, k)] };
            unorm2 += ui.norm_sqr();
            u[i] = ui;
        }
        if unorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / unorm2;

        // Left: rows k+1.., columns k.. ; column k collapses to beta.
        for j in k..n {
            let mut dot = Complex64::ZERO;
            for i in k + 1..n {
                dot += u[i].conj() * a[(i, j)];
            }
            let dot = dot * tau;
            for i in k + 1..n {
                let v = a[(i, j)] - u[i] * dot;
                a[(i, j)] = v;
            }
        }
        a[(k + 1, k)] = beta;
        for i in k + 2..n {
            a[(i, k)] = Complex64::ZERO;
        }
        // Right: all rows, columns k+1.. .
        for i in 0..n {
            let mut dot = Complex64::ZERO;
            for j in k + 1..n {
                dot += a[(i, j)] * u[j];
            }
            let dot = dot * tau;
            for j in k + 1..n {
                let v = a[(i, j)] - dot * u[j].conj();
                a[(i, j)] = v;
            }
        }
        if let Some(qm) = q.as_deref_mut() {
            for i in 0..n {
                let mut dot = Complex64::ZERO;
                for j in k + 1..n {
                    dot += qm[(i, j)] * u[j];
                }
                let dot = dot * tau;
                for j in k + 1..n {
                    let v = qm[(i, j)] - dot * u[j].conj();
                    qm[(i, j)] = v;
                }
            }
        }
        u[k + 1..n].iter_mut().for_each(|z| *z = Complex64::ZERO);
    }
}

struct Givens {
    c: Complex64,
    s: Complex64,
}

/// Unitary G with G [f; g] = [r; 0]:
/// G = (1/r) [[conj(f), conj(g)], [-g, f]].
fn givens(f: Complex64, g: Complex64) -> (Givens, Complex64) {
    let r = (f.norm_sqr() + g.norm_sqr()).sqrt();
    if r == 0.0 {
        return (
            Givens {
                c: Complex64::ONE,
                s: Complex64::ZERO,
            },
            Complex64::ZERO,
        );
    }
    (
        Givens {
            c: f.conj() / r,
            s: g.conj() / r,
        },
        Complex64::new(r, 0.0),
    )
}

/// Shifted QR iteration on an upper Hessenberg matrix; on success the
/// matrix is upper triangular. With `q` present the rotations are applied
/// over full rows/columns and accumulated so A_in = Q T Q* holds.
fn qr_iterate(
    h: &mut DMatrix<Complex64>,
    q: &mut Option<&mut DMatrix<Complex64>>,
) -> Result<(), DenseEigError> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let hnorm = h.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(EPS);
    let max_total = 60 * n.max(10);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut stalled = 0usize;

    loop {
        // Deflate converged subdiagonals from the bottom.
        while hi > 0 {
            let s = h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm();
            let tol = EPS * if s > 0.0 { s } else { hnorm };
            if h[(hi, hi - 1)].norm() <= tol {
                h[(hi, hi - 1)] = Complex64::ZERO;
                hi -= 1;
                stalled = 0;
            } else {
                break;
            }
        }
        if hi == 0 {
            return Ok(());
        }
        // Active window [lo, hi].
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let tol = EPS * if s > 0.0 { s } else { hnorm };
            if h[(lo, lo - 1)].norm() <= tol {
                h[(lo, lo - 1)] = Complex64::ZERO;
                break;
            }
            lo -= 1;
        }

        total += 1;
        stalled += 1;
        if total > max_total {
            return Err(DenseEigError::NoConvergence(total));
        }

        let mu = if stalled % 10 == 0 {
            // Exceptional shift to break symmetric stalls.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h, hi)
        };

        // Explicit shifted QR step on the window. Without Q accumulation
        // the rotations stay inside the window; the off-window blocks no
        // longer track a similarity of the input, but the spectrum of the
        // block triangular form is unchanged.
        let (cl, cr) = match q {
            Some(_) => (0usize, n - 1),
            None => (lo, hi),
        };
        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (g, r) = givens(h[(i, i)], h[(i + 1, i)]);
            h[(i, i)] = r;
            h[(i + 1, i)] = Complex64::ZERO;
            for j in (i + 1).max(cl)..=cr {
                let a = h[(i, j)];
                let b = h[(i + 1, j)];
                h[(i, j)] = g.c * a + g.s * b;
                h[(i + 1, j)] = -g.s.conj() * a + g.c.conj() * b;
            }
            rots.push(g);
        }
        for (ix, g) in rots.iter().enumerate() {
            let i = lo + ix;
            // Columns i, i+1 from the right by G*.
            let top = (i + 1).min(hi);
            for row in cl..=top {
                let a = h[(row, i)];
                let b = h[(row, i + 1)];
                h[(row, i)] = g.c.conj() * a + g.s.conj() * b;
                h[(row, i + 1)] = -g.s * a + g.c * b;
            }
            if let Some(qm) = q.as_deref_mut() {
                for row in 0..n {
                    let a = qm[(row, i)];
                    let b = qm[(row, i + 1)];
                    qm[(row, i)] = g.c.conj() * a + g.s.conj() * b;
                    qm[(row, i + 1)] = -g.s * a + g.c * b;
                }
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
}

/// Eigenvalue of the trailing 2x2 block closest to the corner entry.
fn wilkinson_shift(h: &DMatrix<Complex64>, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr2 = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr2 * tr2 - det).sqrt();
    let e1 = tr2 + disc;
    let e2 = tr2 - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}
