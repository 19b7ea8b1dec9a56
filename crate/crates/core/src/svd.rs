//! Degree-scaled adjacency SVD baseline. Dual left/right embeddings come
//! from truncated singular triplets of D_r^{-1/2} A D_c^{-1/2}; the
//! bipartite lift both powers the large-scale solve and demonstrates why
//! singular values alone cannot see cycle structure.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::graph::Digraph;
use crate::linalg::{lanczos_symmetric, SymOp};
use crate::spectral::{Side, SolverConfig};

#[derive(Debug, Error, PartialEq)]
pub enum SvdError {
    #[error("singular triplets did not converge; worst residual {worst_residual:.3e}")]
    NoConvergence { worst_residual: f64 },
    #[error("projection dimension {dim} is out of range for rank {s}")]
    IndexOutOfRange { dim: usize, s: usize },
}

/// Square sparse real matrix in row-major compressed form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRealMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseRealMatrix {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// y = Mx.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for e in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[e] * x[self.col_idx[e]];
            }
            y[i] = acc;
        }
    }

    /// y = Mᵀx.
    pub fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            for e in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.col_idx[e]] += self.values[e] * x[i];
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for e in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.col_idx[e])] = self.values[e];
            }
        }
        m
    }
}

/// Adjacency with every edge (i, j) weighted 1/√(d_i_out · d_j_in),
/// which caps the spectral norm at 1. Vertices of zero degree simply
/// contribute empty rows or columns.
pub fn scaled_adjacency(g: &Digraph) -> SparseRealMatrix {
    let n = g.n();
    let in_deg = g.in_degrees();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(g.m());
    let mut values = Vec::with_capacity(g.m());
    row_ptr.push(0);
    for i in 0..n {
        let dout = g.out_degree(i) as f64;
        for &j in g.out_neighbors(i) {
            col_idx.push(j);
            values.push(1.0 / (dout * in_deg[j] as f64).sqrt());
        }
        row_ptr.push(col_idx.len());
    }
    SparseRealMatrix {
        n,
        row_ptr,
        col_idx,
        values,
    }
}

/// The undirected bipartite double cover: edge (i, j) of `g` becomes the
/// undirected edge {i, n+j}, stored as a symmetric digraph on 2n
/// vertices. Its adjacency is [[0, A], [Aᵀ, 0]], whose spectrum is the
/// ±singular-value multiset of A.
pub fn bipartite_lift(g: &Digraph) -> Digraph {
    let n = g.n();
    let mut edges = Vec::with_capacity(2 * g.m());
    for (i, j) in g.edges() {
        edges.push((i, n + j));
        edges.push((n + j, i));
    }
    Digraph::from_edge_list(&edges, Some(2 * n)).expect("lift edges are loop-free in bounds")
}

/// Rank-s factorization slice: per-vertex rows of U_s and W_s plus the
/// leading singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdEmbedding {
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
    /// n rows of s coordinates each, from the left singular vectors.
    pub left_coords: Vec<Vec<f64>>,
    /// n rows of s coordinates each, from the right singular vectors.
    pub right_coords: Vec<Vec<f64>>,
    pub scaling: String,
}

const SCALING_DESC: &str = "inverse-sqrt row and column degree";
const TRIPLET_TOL: f64 = 1e-8;

/// Top-s singular triplets of a square sparse matrix.
///
/// Below the dense threshold the full SVD is taken directly; larger
/// problems run a symmetric Lanczos solve on the bipartite form, whose
/// positive eigenpairs are exactly the singular triplets. Every returned
/// triplet is certified to ‖Mw − σu‖ ≤ 1e-8 and ‖Mᵀu − σw‖ ≤ 1e-8.
pub fn truncated_svd(
    m: &SparseRealMatrix,
    s: usize,
    config: &SolverConfig,
) -> Result<SvdEmbedding, SvdError> {
    assert!(s >= 1 && s <= m.n, "rank must satisfy 1 <= s <= n");
    let (sigma, u_cols, w_cols) = if m.n <= config.dense_threshold {
        dense_triplets(m, s)
    } else {
        lanczos_triplets(m, s, config)?
    };

    let mut worst = 0.0f64;
    let mut work = vec![0.0; m.n];
    for j in 0..s {
        m.apply(&w_cols[j], &mut work);
        let r1: f64 = work
            .iter()
            .zip(&u_cols[j])
            .map(|(mw, u)| (mw - sigma[j] * u).powi(2))
            .sum::<f64>()
            .sqrt();
        m.apply_transpose(&u_cols[j], &mut work);
        let r2: f64 = work
            .iter()
            .zip(&w_cols[j])
            .map(|(mu, w)| (mu - sigma[j] * w).powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r1).max(r2);
    }
    if worst > TRIPLET_TOL {
        return Err(SvdError::NoConvergence {
            worst_residual: worst,
        });
    }

    let left_coords = (0..m.n)
        .map(|i| (0..s).map(|j| u_cols[j][i]).collect())
        .collect();
    let right_coords = (0..m.n)
        .map(|i| (0..s).map(|j| w_cols[j][i]).collect())
        .collect();
    Ok(SvdEmbedding {
        singular_values: sigma,
        left_coords,
        right_coords,
        scaling: SCALING_DESC.to_string(),
    })
}

type Triplets = (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>);

fn dense_triplets(m: &SparseRealMatrix, s: usize) -> Triplets {
    let svd = m.to_dense().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..m.n).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let mut sigma = Vec::with_capacity(s);
    let mut u_cols = Vec::with_capacity(s);
    let mut w_cols = Vec::with_capacity(s);
    for &idx in order.iter().take(s) {
        sigma.push(svd.singular_values[idx]);
        u_cols.push((0..m.n).map(|i| u[(i, idx)]).collect());
        w_cols.push((0..m.n).map(|i| vt[(idx, i)]).collect());
    }
    (sigma, u_cols, w_cols)
}

/// Symmetric operator z = (x, y) ↦ (My, Mᵀx) whose positive eigenpairs
/// (σ, (u, w)/√2) are the singular triplets of M.
struct BipartiteOp<'a> {
    m: &'a SparseRealMatrix,
}

impl SymOp for BipartiteOp<'_> {
    fn dim(&self) -> usize {
        2 * self.m.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.m.n;
        self.m.apply(&x[n..], &mut y[..n]);
        self.m.apply_transpose(&x[..n], &mut y[n..]);
    }
}

fn lanczos_triplets(
    m: &SparseRealMatrix,
    s: usize,
    config: &SolverConfig,
) -> Result<Triplets, SvdError> {
    let op = BipartiteOp { m };
    let (evals, evecs) = lanczos_symmetric(&op, s, config.tol.max(1e-12), config.seed)
        .map_err(|_| SvdError::NoConvergence {
            worst_residual: f64::MAX,
        })?;
    let n = m.n;
    let mut sigma = Vec::with_capacity(s);
    let mut u_cols = Vec::with_capacity(s);
    let mut w_cols = Vec::with_capacity(s);
    for (ev, z) in evals.iter().zip(&evecs) {
        let mut u: Vec<f64> = z[..n].to_vec();
        let mut w: Vec<f64> = z[n..].to_vec();
        let nu = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nw = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        // Halves of a clean eigenvector carry equal mass 1/√2; fall back
        // to the raw halves near a zero singular value.
        if nu > 1e-12 && nw > 1e-12 {
            u.iter_mut().for_each(|v| *v /= nu);
            w.iter_mut().for_each(|v| *v /= nw);
        }
        sigma.push(ev.max(0.0));
        u_cols.push(u);
        w_cols.push(w);
    }
    Ok((sigma, u_cols, w_cols))
}

/// Two chosen coordinate columns of one side, as planar points.
pub fn svd_planar_projection(
    e: &SvdEmbedding,
    dims: (usize, usize),
    side: Side,
) -> Result<Vec<(f64, f64)>, SvdError> {
    let s = e.singular_values.len();
    let (a, b) = dims;
    assert!(a != b, "projection needs two distinct dimensions");
    for dim in [a, b] {
        if dim >= s {
            return Err(SvdError::IndexOutOfRange { dim, s });
        }
    }
    let coords = match side {
        Side::Left => &e.left_coords,
        Side::Right => &e.right_coords,
        Side::Both => panic!("projection needs a single side"),
    };
    Ok(coords.iter().map(|row| (row[a], row[b])).collect())
}
