//! Eigenvalue machinery for transition matrices: full dense spectra,
//! targeted solves near roots of unity, residual certification, and the
//! k-fold lift spectrum identity.

mod arnoldi;
mod inverse;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{GraphError, TransitionMatrix};
use crate::linalg::{self, DenseEigError};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("matrix of dimension {n} exceeds the dense threshold {threshold}")]
    TooLarge { n: usize, threshold: usize },
    #[error("no convergence; best residual {best_residual:.3e}")]
    NoConvergence { best_residual: f64 },
    #[error(
        "eigenvalues {a} and {b} are equidistant from the target within 1e-8; \
         selection is ambiguous"
    )]
    AmbiguousTarget { a: Complex64, b: Complex64 },
    #[error("{p}/{q} is not a reduced fraction with q >= 1")]
    BadTarget { p: u32, q: u32 },
    #[error(transparent)]
    Dense(#[from] DenseEigError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Root of unity θ_{p,q} = exp(ι2πp/q), the solve target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootTarget {
    p: u32,
    q: u32,
}

impl RootTarget {
    /// Requires q ≥ 1 and gcd(p, q) = 1 with p < q (p = 0 only with q = 1).
    pub fn new(p: u32, q: u32) -> Result<RootTarget, SpectralError> {
        fn gcd(a: u32, b: u32) -> u32 {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        let ok = q >= 1 && p < q.max(1) && gcd(p.max(1), q) == 1 || (p == 0 && q == 1);
        if !ok || (p == 0 && q != 1) {
            return Err(SpectralError::BadTarget { p, q });
        }
        Ok(RootTarget { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.p as f64 / self.q as f64)
    }
}

impl std::fmt::Display for RootTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Both,
}

impl Side {
    pub fn wants_right(self) -> bool {
        matches!(self, Side::Right | Side::Both)
    }

    pub fn wants_left(self) -> bool {
        matches!(self, Side::Left | Side::Both)
    }
}

/// One eigenvalue with whichever eigenvectors were requested. Vectors have
/// unit 2-norm and are phase-normalized: the largest-magnitude entry is
/// real and positive, so repeated solves produce identical embeddings.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: Complex64,
    pub right: Option<Vec<Complex64>>,
    pub left: Option<Vec<Complex64>>,
    /// ‖Bv − λv‖₂ for the unit right vector, when present.
    pub right_residual: Option<f64>,
    /// ‖y*B − λy*‖₂ for the unit left vector, when present.
    pub left_residual: Option<f64>,
}

/// Solver knobs shared by the dense and iterative paths.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Above this dimension the dense path refuses and targeted solves
    /// switch to shift-invert Arnoldi.
    pub dense_threshold: usize,
    /// Residual certification bound.
    pub tol: f64,
    /// Arnoldi basis size per restart cycle.
    pub arnoldi_dim: usize,
    pub max_restarts: usize,
    /// Seed for deterministic start vectors.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dense_threshold: 4000,
            tol: 1e-10,
            arnoldi_dim: 40,
            max_restarts: 200,
            seed: 0,
        }
    }
}

/// y = B x over complex vectors.
pub(crate) fn apply_b(b: &TransitionMatrix, x: &[Complex64], y: &mut [Complex64]) {
    let g = b.graph();
    for i in 0..g.n() {
        let nbrs = g.out_neighbors(i);
        let mut acc = Complex64::ZERO;
        for &j in nbrs {
            acc += x[j];
        }
        y[i] = acc / nbrs.len() as f64;
    }
}

/// y = Bᵀ x over complex vectors.
pub(crate) fn apply_bt(b: &TransitionMatrix, x: &[Complex64], y: &mut [Complex64]) {
    let g = b.graph();
    y.iter_mut().for_each(|z| *z = Complex64::ZERO);
    for i in 0..g.n() {
        let nbrs = g.out_neighbors(i);
        let w = x[i] / nbrs.len() as f64;
        for &j in nbrs {
            y[j] += w;
        }
    }
}

/// All eigenvalues of B by the dense path.
///
/// The spectrum of a real matrix is closed under conjugation; the complex
/// QR iteration does not deliver that exactly, so nonreal values are
/// greedily paired with their nearest conjugate candidate and symmetrized,
/// and imaginary parts at rounding scale are snapped to zero.
pub fn dense_spectrum(
    b: &TransitionMatrix,
    config: &SolverConfig,
) -> Result<Vec<Complex64>, SpectralError> {
    let n = b.n();
    if n > config.dense_threshold {
        return Err(SpectralError::TooLarge {
            n,
            threshold: config.dense_threshold,
        });
    }
    // B is real, so the real Francis iteration applies first; it keeps
    // the spectrum conjugate-symmetric by construction, which the complex
    // QR path does not guarantee on ill-conditioned clusters. Its shift
    // strategy stagnates on exact cycle symmetries (a pure permutation
    // matrix is the classic case), so the iteration count is capped and
    // the complex path with exceptional shifts covers the remainder.
    let mut dense = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for (j, w) in b.row(i) {
            dense[(i, j)] = w;
        }
    }
    let max_niter = 60 * n + 200;
    let mut vals: Vec<Complex64> =
        match nalgebra::linalg::Schur::try_new(dense, f64::EPSILON, max_niter) {
            Some(schur) => schur
                .complex_eigenvalues()
                .iter()
                .map(|z| Complex64::new(z.re, z.im))
                .collect(),
            None => linalg::eigenvalues(&to_complex_dense(b))?,
        };
    conjugate_closure(&mut vals);
    Ok(vals)
}

fn to_complex_dense(b: &TransitionMatrix) -> DMatrix<Complex64> {
    let n = b.n();
    let mut dense = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for (j, w) in b.row(i) {
            dense[(i, j)] = Complex64::new(w, 0.0);
        }
    }
    dense
}

/// Snap tiny imaginary parts and enforce exact conjugate pairing.
fn conjugate_closure(vals: &mut [Complex64]) {
    let snap = 64.0 * f64::EPSILON * (vals.len() as f64).max(1.0).sqrt();
    for v in vals.iter_mut() {
        if v.im.abs() <= snap {
            v.im = 0.0;
        }
    }
    let mut pos: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].im > 0.0).collect();
    let mut neg: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].im < 0.0).collect();
    // Greedy nearest-conjugate pairing; collisions are resolved by
    // processing positives in ascending imaginary part.
    pos.sort_by(|&a, &b| vals[a].im.partial_cmp(&vals[b].im).unwrap());
    for &i in &pos {
        let want = vals[i].conj();
        let Some((slot, &j)) = neg
            .iter()
            .enumerate()
            .min_by(|(_, &x), (_, &y)| {
                (vals[x] - want)
                    .norm()
                    .partial_cmp(&(vals[y] - want).norm())
                    .unwrap()
            })
        else {
            break;
        };
        neg.swap_remove(slot);
        let mean = (vals[i] + vals[j].conj()) * 0.5;
        vals[i] = mean;
        vals[j] = mean.conj();
    }
}

/// Rotates `v` so its largest-magnitude entry (first index on exact ties)
/// becomes real and positive.
pub fn phase_normalize(v: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_mag = f64::NEG_INFINITY;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag > 0.0 {
        let rot = v[best].conj() / best_mag;
        v.iter_mut().for_each(|z| *z *= rot);
    }
}

/// The eigenpair whose eigenvalue is closest to θ_{p,q}, with vectors for
/// the requested side(s), residual-certified to `config.tol`.
///
/// Dimension at most `dense_threshold` selects the eigenvalue from the
/// full dense spectrum and computes vectors by inverse iteration; larger
/// problems run shift-invert Arnoldi at the target. A non-strongly
/// connected input only warns: the solve is still defined, but the
/// Perron structure the selection leans on may be absent.
pub fn nearest_eigenpair(
    b: &TransitionMatrix,
    target: RootTarget,
    side: Side,
    config: &SolverConfig,
) -> Result<EigenPair, SpectralError> {
    if b.graph().strongly_connected_components().component_count() != 1 {
        log::warn!("graph is not strongly connected; eigenvalue targeting may be unreliable");
    }
    let theta = target.value();
    if b.n() <= config.dense_threshold {
        let vals = dense_spectrum(b, config)?;
        let lambda = select_nearest(&vals, theta)?;
        finish_pair_by_inverse_iteration(b, lambda, side, config)
    } else {
        arnoldi::nearest_eigenpair(b, theta, side, config)
    }
}

/// Arg-min of |λ − θ| with the equidistance guard.
fn select_nearest(vals: &[Complex64], theta: Complex64) -> Result<Complex64, SpectralError> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| {
        (vals[a] - theta)
            .norm()
            .partial_cmp(&(vals[b] - theta).norm())
            .unwrap()
    });
    let best = order[0];
    if let Some(&second) = order.get(1) {
        let d0 = (vals[best] - theta).norm();
        let d1 = (vals[second] - theta).norm();
        // Two copies of one eigenvalue are not an ambiguity; two distinct
        // eigenvalues at the same distance are.
        if d1 - d0 <= 1e-8 && (vals[best] - vals[second]).norm() > 1e-8 {
            return Err(SpectralError::AmbiguousTarget {
                a: vals[best],
                b: vals[second],
            });
        }
    }
    Ok(vals[best])
}

fn finish_pair_by_inverse_iteration(
    b: &TransitionMatrix,
    lambda: Complex64,
    side: Side,
    config: &SolverConfig,
) -> Result<EigenPair, SpectralError> {
    let mut pair = EigenPair {
        lambda,
        right: None,
        left: None,
        right_residual: None,
        left_residual: None,
    };
    if side.wants_right() {
        let (mut v, resid, refined) = inverse::eigenvector(b, lambda, false, config);
        if resid > config.tol {
            return Err(SpectralError::NoConvergence {
                best_residual: resid,
            });
        }
        phase_normalize(&mut v);
        pair.lambda = refined;
        pair.right = Some(v);
        pair.right_residual = Some(resid);
    }
    if side.wants_left() {
        let (mut y, resid, refined) = inverse::eigenvector(b, lambda, true, config);
        if resid > config.tol {
            return Err(SpectralError::NoConvergence {
                best_residual: resid,
            });
        }
        phase_normalize(&mut y);
        if pair.right.is_none() {
            pair.lambda = refined;
        }
        pair.left = Some(y);
        pair.left_residual = Some(resid);
    }
    Ok(pair)
}

/// Recomputed residuals for whichever vectors the pair carries:
/// (‖Bv − λv‖₂, ‖y*B − λy*‖₂).
pub fn residual(b: &TransitionMatrix, pair: &EigenPair) -> (Option<f64>, Option<f64>) {
    let n = b.n();
    let mut work = vec![Complex64::ZERO; n];
    let right = pair.right.as_ref().map(|v| {
        apply_b(b, v, &mut work);
        work.iter()
            .zip(v)
            .map(|(bv, vi)| (bv - pair.lambda * vi).norm_sqr())
            .sum::<f64>()
            .sqrt()
    });
    let left = pair.left.as_ref().map(|y| {
        // y*B = λy*  ⟺  Bᴴy = λ̄y, and Bᴴ = Bᵀ for real B.
        apply_bt(b, y, &mut work);
        work.iter()
            .zip(y)
            .map(|(bty, yi)| (bty - pair.lambda.conj() * yi).norm_sqr())
            .sum::<f64>()
            .sqrt()
    });
    (right, left)
}

/// Outcome of comparing σ(B_k) with the rotated copies of σ(B).
#[derive(Debug, Clone)]
pub struct LiftSpectrumReport {
    pub matched: bool,
    /// Largest |a − b| over the optimal pairing.
    pub max_pair_distance: f64,
    pub tolerance: f64,
    pub lift_spectrum: Vec<Complex64>,
    pub rotated_spectrum: Vec<Complex64>,
}

/// Verifies that the k-fold stateful lift's transition spectrum is the
/// union of k rotated copies {θ_{p,k}·λ} of σ(B), as multisets, under an
/// optimal assignment. Cost grows cubically with k·n; this is a
/// verification tool for small graphs.
pub fn lift_spectrum_check(
    b: &TransitionMatrix,
    k: usize,
    tol: f64,
    config: &SolverConfig,
) -> Result<LiftSpectrumReport, SpectralError> {
    let n = b.n();
    if n * k > config.dense_threshold {
        return Err(SpectralError::TooLarge {
            n: n * k,
            threshold: config.dense_threshold,
        });
    }
    let lifted = b.graph().stateful_lift(k)?;
    let bk = TransitionMatrix::from_graph(&lifted)?;
    let lift_spectrum = dense_spectrum(&bk, config)?;

    let base = dense_spectrum(b, config)?;
    let mut rotated = Vec::with_capacity(base.len() * k);
    for p in 0..k {
        let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * p as f64 / k as f64);
        rotated.extend(base.iter().map(|&l| rot * l));
    }

    let m = lift_spectrum.len();
    debug_assert_eq!(m, rotated.len());
    let cost: Vec<Vec<f64>> = lift_spectrum
        .iter()
        .map(|a| rotated.iter().map(|b| (a - b).norm()).collect())
        .collect();
    let assign = linalg::min_cost_assignment(&cost);
    let max_pair_distance = assign
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .fold(0.0f64, f64::max);

    Ok(LiftSpectrumReport {
        matched: max_pair_distance <= tol,
        max_pair_distance,
        tolerance: tol,
        lift_spectrum,
        rotated_spectrum: rotated,
    })
}
