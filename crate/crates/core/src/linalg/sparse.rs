//! Compressed sparse column matrices over complex scalars and a
//! left-looking sparse LU with partial pivoting.
//!
//! The factorization tolerates numerically singular input: a pivot whose
//! magnitude falls below a threshold is replaced by a tiny value of the
//! same matrix scale. Inverse iteration relies on this, since it solves
//! against matrices that are singular by design.

use num_complex::Complex64;

/// Square sparse matrix in CSC form. Row indices within each column are
/// strictly increasing.
#[derive(Debug, Clone)]
pub struct CscMatrix {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl CscMatrix {
    /// Assembles from triplets; duplicates sum. Panics on out-of-range
    /// indices (construction sites are internal).
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, Complex64)]) -> CscMatrix {
        let mut per_col: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) out of range for n={n}");
            per_col[j].push((i, v));
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for col in per_col.iter_mut() {
            col.sort_by_key(|&(i, _)| i);
            let mut last = usize::MAX;
            for &(i, v) in col.iter() {
                if i == last {
                    let tail = values.len() - 1;
                    values[tail] += v;
                } else {
                    row_idx.push(i);
                    values.push(v);
                    last = i;
                }
            }
            col_ptr.push(row_idx.len());
        }
        CscMatrix {
            n,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn col(&self, j: usize) -> (&[usize], &[Complex64]) {
        let (lo, hi) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[lo..hi], &self.values[lo..hi])
    }

    /// y = A x.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|z| *z = Complex64::ZERO);
        for j in 0..self.n {
            let xj = x[j];
            if xj == Complex64::ZERO {
                continue;
            }
            let (rows, vals) = self.col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                y[i] += v * xj;
            }
        }
    }

    /// Largest column 1-norm, a cheap scale estimate.
    pub fn norm_scale(&self) -> f64 {
        (0..self.n)
            .map(|j| self.col(j).1.iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// PA = LU factorization, L unit lower triangular, U upper triangular,
/// P a row permutation from partial pivoting.
pub struct SparseLu {
    n: usize,
    /// pinv[original_row] = pivot position.
    pinv: Vec<usize>,
    /// pivot_row[k] = original row pivoting column k.
    pivot_row: Vec<usize>,
    /// Column k of L below the unit diagonal, as (original_row, value).
    l_cols: Vec<Vec<(usize, Complex64)>>,
    /// Column k of U above the diagonal, as (pivot_position, value).
    u_cols: Vec<Vec<(usize, Complex64)>>,
    u_diag: Vec<Complex64>,
    /// True when a pivot had to be replaced to continue.
    singular: bool,
}

impl SparseLu {
    /// Factorizes `a`. Pivots below machine epsilon times the matrix scale
    /// are replaced by that threshold and the factorization is flagged
    /// [`SparseLu::is_singular`]; solves then amplify the near-null
    /// direction instead of failing, which is what inverse iteration needs.
    pub fn factor(a: &CscMatrix) -> SparseLu {
        let n = a.n;
        const UNPIVOTED: usize = usize::MAX;
        let scale = a.norm_scale().max(f64::MIN_POSITIVE);
        let tiny = f64::EPSILON * scale;

        let mut pinv = vec![UNPIVOTED; n];
        let mut pivot_row = vec![0usize; n];
        let mut l_cols: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(n);
        let mut u_cols: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(n);
        let mut u_diag = vec![Complex64::ZERO; n];
        let mut singular = false;

        // Dense workspaces reused across columns.
        let mut x = vec![Complex64::ZERO; n];
        let mut mark = vec![usize::MAX; n];
        let mut topo: Vec<usize> = Vec::with_capacity(n);
        let mut dfs_stack: Vec<(usize, usize)> = Vec::new();

        for k in 0..n {
            // Symbolic step: the nonzero pattern of column k of (L\U) is the
            // set of rows reachable from pattern(A[:,k]) through solved
            // pivot columns. Depth-first search emits rows in reverse
            // topological order.
            topo.clear();
            let (rows, vals) = a.col(k);
            for &r in rows {
                if mark[r] == k {
                    continue;
                }
                dfs_stack.push((r, 0));
                mark[r] = k;
                while let Some(&mut (node, ref mut pos)) = dfs_stack.last_mut() {
                    let col = pinv[node];
                    let deps: &[(usize, Complex64)] = if col == UNPIVOTED {
                        &[]
                    } else {
                        &l_cols[col]
                    };
                    if *pos < deps.len() {
                        let child = deps[*pos].0;
                        *pos += 1;
                        if mark[child] != k {
                            mark[child] = k;
                            dfs_stack.push((child, 0));
                        }
                    } else {
                        dfs_stack.pop();
                        topo.push(node);
                    }
                }
            }

            // Numeric step in topological order (reverse of emission).
            for &r in topo.iter() {
                x[r] = Complex64::ZERO;
            }
            for (&r, &v) in rows.iter().zip(vals) {
                x[r] = v;
            }
            for &r in topo.iter().rev() {
                let col = pinv[r];
                if col == UNPIVOTED {
                    continue;
                }
                let xr = x[r];
                if xr == Complex64::ZERO {
                    continue;
                }
                for &(lr, lv) in &l_cols[col] {
                    x[lr] -= lv * xr;
                }
            }

            // Pivot: the largest-magnitude entry among unpivoted rows.
            let mut best: Option<(usize, f64)> = None;
            for &r in topo.iter() {
                if pinv[r] == UNPIVOTED {
                    let m = x[r].norm();
                    if best.map_or(true, |(_, bm)| m > bm) {
                        best = Some((r, m));
                    }
                }
            }
            let (prow, pmag) = match best {
                Some(b) => b,
                None => {
                    // Structurally empty column: fabricate a pivot on the
                    // first free row.
                    let r = (0..n).find(|&r| pinv[r] == UNPIVOTED).expect("free row");
                    x[r] = Complex64::ZERO;
                    if mark[r] != k {
                        mark[r] = k;
                        topo.push(r);
                    }
                    (r, 0.0)
                }
            };
            let mut pval = x[prow];
            if pmag < tiny {
                singular = true;
                pval = Complex64::new(tiny.max(f64::MIN_POSITIVE), 0.0);
            }
            pinv[prow] = k;
            pivot_row[k] = prow;
            u_diag[k] = pval;

            let mut lcol = Vec::new();
            let mut ucol = Vec::new();
            for &r in topo.iter() {
                if r == prow {
                    continue;
                }
                let v = x[r];
                if v == Complex64::ZERO {
                    continue;
                }
                match pinv[r] {
                    UNPIVOTED => lcol.push((r, v / pval)),
                    pos => ucol.push((pos, v)),
                }
            }
            // Sorted U columns make the adjoint solve cache-friendly and
            // deterministic.
            ucol.sort_by_key(|&(pos, _)| pos);
            lcol.sort_by_key(|&(r, _)| r);
            l_cols.push(lcol);
            u_cols.push(ucol);
        }

        SparseLu {
            n,
            pinv,
            pivot_row,
            l_cols,
            u_cols,
            u_diag,
            singular,
        }
    }

    /// Whether any pivot was replaced during factorization.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Solves A x = b in place.
    pub fn solve(&self, b: &mut [Complex64]) {
        let n = self.n;
        let mut z = vec![Complex64::ZERO; n];
        for k in 0..n {
            z[k] = b[self.pivot_row[k]];
        }
        // L z' = P b, unit diagonal.
        for k in 0..n {
            let zk = z[k];
            if zk == Complex64::ZERO {
                continue;
            }
            for &(r, lv) in &self.l_cols[k] {
                z[self.pinv[r]] -= lv * zk;
            }
        }
        // U w = z'.
        for k in (0..n).rev() {
            let wk = z[k] / self.u_diag[k];
            z[k] = wk;
            if wk == Complex64::ZERO {
                continue;
            }
            for &(pos, uv) in &self.u_cols[k] {
                z[pos] -= uv * wk;
            }
        }
        b.copy_from_slice(&z);
    }

    /// Solves A* y = b in place, reusing the same factorization:
    /// A* = U* L* P, so a forward solve with U*, a back solve with L*,
    /// then the permutation.
    pub fn solve_adjoint(&self, b: &mut [Complex64]) {
        let n = self.n;
        let mut z = vec![Complex64::ZERO; n];
        // U* z = b, lower triangular via U's columns.
        for k in 0..n {
            let mut s = b[k];
            for &(pos, uv) in &self.u_cols[k] {
                s -= uv.conj() * z[pos];
            }
            z[k] = s / self.u_diag[k].conj();
        }
        // L* w = z, upper triangular with unit diagonal.
        for k in (0..n).rev() {
            let mut s = z[k];
            for &(r, lv) in &self.l_cols[k] {
                s -= lv.conj() * z[self.pinv[r]];
            }
            z[k] = s;
        }
        for k in 0..n {
            b[self.pivot_row[k]] = z[k];
        }
    }
}
