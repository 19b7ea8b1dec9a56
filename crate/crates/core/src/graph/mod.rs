//! Directed graphs in compressed sparse row form and the row-stochastic
//! transition matrix built from them.

mod scc;
pub mod io;

pub use scc::SccResult;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    /// Edge (v, v) encountered while self-loops are disallowed.
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex index {index} out of range for a graph on {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    /// A vertex with no outgoing edges has an undefined transition row.
    #[error("vertex {0} has out-degree zero")]
    DanglingVertex(usize),
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("cycle length must be at least 2, got {0}")]
    CycleLengthTooSmall(usize),
}

/// Simple directed graph on vertices `0..n`, stored in CSR form.
///
/// The representation is canonical: every adjacency list is sorted
/// ascending and free of duplicates, and no self-loops are present.
/// Two graphs compare equal iff they have the same vertex count and
/// edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl Digraph {
    /// Builds a graph from an edge list.
    ///
    /// `n` fixes the vertex count; pass `None` to infer it as one past the
    /// largest endpoint (zero for an empty list). Duplicate edges collapse
    /// to one. Self-loops and out-of-range endpoints are rejected.
    pub fn from_edge_list(edges: &[(usize, usize)], n: Option<usize>) -> Result<Self, GraphError> {
        let n = match n {
            Some(n) => n,
            None => edges
                .iter()
                .map(|&(u, v)| u.max(v) + 1)
                .max()
                .unwrap_or(0),
        };
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for ix in [u, v] {
                if ix >= n {
                    return Err(GraphError::IndexOutOfRange { index: ix, n });
                }
            }
        }

        let mut row_ptr = vec![0usize; n + 1];
        for &(u, _) in edges {
            row_ptr[u + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut col_idx = vec![0usize; edges.len()];
        let mut fill = row_ptr.clone();
        for &(u, v) in edges {
            col_idx[fill[u]] = v;
            fill[u] += 1;
        }

        // Sort each row, then drop duplicates in place.
        let mut write = 0;
        let mut new_ptr = vec![0usize; n + 1];
        for i in 0..n {
            let (lo, hi) = (row_ptr[i], row_ptr[i + 1]);
            col_idx[lo..hi].sort_unstable();
            let mut prev = usize::MAX;
            for k in lo..hi {
                if col_idx[k] != prev {
                    prev = col_idx[k];
                    col_idx[write] = prev;
                    write += 1;
                }
            }
            new_ptr[i + 1] = write;
        }
        col_idx.truncate(write);

        Ok(Digraph {
            n,
            row_ptr: new_ptr,
            col_idx,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.col_idx.len()
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[v]..self.row_ptr[v + 1]]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.row_ptr[v + 1] - self.row_ptr[v]
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &v in &self.col_idx {
            deg[v] += 1;
        }
        deg
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    /// Iterates over edges as `(source, target)` in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Graph with every edge reversed.
    pub fn transpose(&self) -> Digraph {
        let rev: Vec<(usize, usize)> = self.edges().map(|(u, v)| (v, u)).collect();
        Digraph::from_edge_list(&rev, Some(self.n)).expect("transpose preserves validity")
    }

    /// Strongly connected components; see [`SccResult`].
    pub fn strongly_connected_components(&self) -> SccResult {
        scc::tarjan(self)
    }

    /// Restriction of the graph to its largest strongly connected component,
    /// together with the map from new vertex ids back to original ones.
    ///
    /// Ties on component size break toward the component containing the
    /// smallest original vertex index. The returned map is sorted ascending,
    /// so relative vertex order survives the restriction.
    pub fn largest_scc(&self) -> (Digraph, Vec<usize>) {
        let scc = self.strongly_connected_components();
        let keep = scc.largest_component_vertices();
        let pos = |v: usize| keep.binary_search(&v).ok();
        let mut edges = Vec::new();
        for (u, v) in self.edges() {
            if let (Some(a), Some(b)) = (pos(u), pos(v)) {
                edges.push((a, b));
            }
        }
        let induced =
            Digraph::from_edge_list(&edges, Some(keep.len())).expect("induced subgraph is valid");
        (induced, keep)
    }

    /// The k-fold stateful lift: k copies of the vertex set, with each
    /// original edge (u, v) rewired to step the copy index forward by one,
    /// i.e. an edge from `u + ((c + k - 1) % k) * n` to `v + c * n` for
    /// every copy `c`. Walks in the lift return to their starting copy
    /// only after a multiple of k steps.
    pub fn stateful_lift(&self, k: usize) -> Result<Digraph, GraphError> {
        if k < 2 {
            return Err(GraphError::CycleLengthTooSmall(k));
        }
        let n = self.n;
        let mut edges = Vec::with_capacity(self.m() * k);
        for (u, v) in self.edges() {
            for c in 0..k {
                edges.push((u + ((c + k - 1) % k) * n, v + c * n));
            }
        }
        Digraph::from_edge_list(&edges, Some(n * k))
    }

    /// Partition of a strongly connected graph into k classes such that
    /// every edge advances the class index by exactly one mod k, if such a
    /// partition exists. Class 0 contains vertex 0.
    ///
    /// Returns `Ok(Some(classes))` with `classes[c]` sorted ascending when
    /// the graph is purely k-cyclic, `Ok(None)` when it is not, and an error
    /// when it is not strongly connected.
    pub fn bfs_cyclic_partition(&self, k: usize) -> Result<Option<Vec<Vec<usize>>>, GraphError> {
        if k < 2 {
            return Err(GraphError::CycleLengthTooSmall(k));
        }
        if self.n == 0 {
            return Err(GraphError::NotStronglyConnected);
        }
        let scc = self.strongly_connected_components();
        if scc.component_count() != 1 {
            return Err(GraphError::NotStronglyConnected);
        }

        // BFS from vertex 0 assigns labels by distance mod k; a second pass
        // checks that every edge is consistent with the labeling.
        let mut label = vec![usize::MAX; self.n];
        label[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            let next = (label[u] + 1) % k;
            for &v in self.out_neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        for (u, v) in self.edges() {
            if (label[u] + 1) % k != label[v] {
                return Ok(None);
            }
        }
        let mut classes = vec![Vec::new(); k];
        for (v, &c) in label.iter().enumerate() {
            classes[c].push(v);
        }
        Ok(Some(classes))
    }

    /// Probability of returning to the start vertex after exactly k steps
    /// of the random walk, for every vertex: the diagonal of the k-th power
    /// of the transition matrix.
    ///
    /// Computed one row at a time by propagating an indicator vector, so
    /// the k-th power is never formed.
    pub fn return_probability_score(&self, k: usize) -> Result<Vec<f64>, GraphError> {
        let b = TransitionMatrix::from_graph(self)?;
        let n = self.n;
        let mut score = vec![0.0f64; n];
        let mut cur = vec![0.0f64; n];
        let mut next = vec![0.0f64; n];
        for s in 0..n {
            cur.iter_mut().for_each(|x| *x = 0.0);
            cur[s] = 1.0;
            // cur holds row s of B^t; one step scatters mass along edges.
            let mut frontier: Vec<usize> = vec![s];
            for _ in 0..k {
                next.iter_mut().for_each(|x| *x = 0.0);
                let mut touched = Vec::with_capacity(frontier.len() * 2);
                for &u in &frontier {
                    let w = cur[u] / b.out_degree(u) as f64;
                    for &v in self.out_neighbors(u) {
                        if next[v] == 0.0 {
                            touched.push(v);
                        }
                        next[v] += w;
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                std::mem::swap(&mut cur, &mut next);
                frontier = touched;
            }
            score[s] = cur[s];
        }
        Ok(score)
    }
}

/// Row-stochastic transition matrix of a random walk on a digraph:
/// `B[i][j] = 1 / out_degree(i)` for each edge (i, j), zero elsewhere.
///
/// Borrows the graph; construction fails if any vertex has out-degree zero.
#[derive(Debug, Clone, Copy)]
pub struct TransitionMatrix<'g> {
    graph: &'g Digraph,
}

impl<'g> TransitionMatrix<'g> {
    pub fn from_graph(graph: &'g Digraph) -> Result<Self, GraphError> {
        for v in 0..graph.n() {
            if graph.out_degree(v) == 0 {
                return Err(GraphError::DanglingVertex(v));
            }
        }
        Ok(TransitionMatrix { graph })
    }

    pub fn graph(&self) -> &'g Digraph {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.graph.out_degree(v)
    }

    /// Row i as (column, value) pairs, columns ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let w = 1.0 / self.graph.out_degree(i) as f64;
        self.graph.out_neighbors(i).iter().map(move |&j| (j, w))
    }

    /// y = B x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n() {
            let nbrs = self.graph.out_neighbors(i);
            let mut acc = 0.0;
            for &j in nbrs {
                acc += x[j];
            }
            y[i] = acc / nbrs.len() as f64;
        }
    }

    /// y = Bᵀ x.
    pub fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n() {
            let nbrs = self.graph.out_neighbors(i);
            let w = x[i] / nbrs.len() as f64;
            for &j in nbrs {
                y[j] += w;
            }
        }
    }
}
