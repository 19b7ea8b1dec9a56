//! Planar embedding of a complex eigenvector and the two clustering
//! routes on top of it: angular sectors for a known cycle length, and
//! density-based clustering for exploratory structure.

use num_complex::Complex64;
use thiserror::Error;

use crate::graph::Digraph;
use crate::spectral::{EigenPair, Side};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error("eigenpair carries no {side:?} eigenvector")]
    MissingSide { side: Side },
    #[error("embedding requires a single side, not Both")]
    BothSides,
    #[error("embedding has no vertices")]
    EmptyEmbedding,
}

/// Vertex coordinates (Re v_i, Im v_i) of a phase-normalized eigenvector,
/// tagged with the eigenvalue, side, and target cycle length they came
/// from. Magnitude p_i and angle t_i of x_i = p_i·exp(ι2πt_i) are derived
/// per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarEmbedding {
    pub coords: Vec<(f64, f64)>,
    pub lambda: Complex64,
    pub side: Side,
    pub k: usize,
}

impl PlanarEmbedding {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn magnitude(&self, i: usize) -> f64 {
        let (x, y) = self.coords[i];
        x.hypot(y)
    }

    /// Angle in (0, 2π]; the positive real axis reads as 2π.
    pub fn angle(&self, i: usize) -> f64 {
        let (x, y) = self.coords[i];
        let a = y.atan2(x);
        if a <= 0.0 { a + TWO_PI } else { a }
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.magnitude(i)).collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        (0..self.n()).map(|i| self.magnitude(i)).fold(0.0, f64::max)
    }
}

/// Projects the requested side's eigenvector to the plane. The scaling
/// convention keeps the unit 2-norm vector as is; only angles and
/// magnitude ratios matter downstream.
///
/// A real eigenvalue collapses the embedding to a line, which is legal
/// but rarely intended; it logs a warning.
pub fn embed(pair: &EigenPair, side: Side, k: usize) -> Result<PlanarEmbedding, EmbedError> {
    let v = match side {
        Side::Right => pair.right.as_ref(),
        Side::Left => pair.left.as_ref(),
        Side::Both => return Err(EmbedError::BothSides),
    }
    .ok_or(EmbedError::MissingSide { side })?;
    if pair.lambda.im.abs() < 1e-8 {
        log::warn!(
            "eigenvalue {} is (nearly) real; planar embedding degenerates to a line",
            pair.lambda
        );
    }
    Ok(PlanarEmbedding {
        coords: v.iter().map(|z| (z.re, z.im)).collect(),
        lambda: pair.lambda,
        side,
        k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterMethod {
    Sector,
    Dbscan,
}

/// Group labels over the embedded vertices; `None` marks noise. `seeds`
/// lists each group's members by descending magnitude, so a prefix of a
/// group's list is its most clearly identified representatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub labels: Vec<Option<usize>>,
    pub method: ClusterMethod,
    pub seeds: Vec<Vec<usize>>,
}

impl ClusterResult {
    pub fn group_count(&self) -> usize {
        self.seeds.len()
    }

    /// Assembles a result from raw labels, ordering each group's seed
    /// list by descending magnitude (index ascending on exact ties).
    pub fn from_labels(
        labels: Vec<Option<usize>>,
        magnitudes: &[f64],
        method: ClusterMethod,
        groups: usize,
    ) -> ClusterResult {
        assert_eq!(labels.len(), magnitudes.len());
        let mut seeds: Vec<Vec<usize>> = vec![Vec::new(); groups];
        for (i, l) in labels.iter().enumerate() {
            if let Some(g) = l {
                seeds[*g].push(i);
            }
        }
        for group in &mut seeds {
            group.sort_by(|&a, &b| {
                magnitudes[b]
                    .partial_cmp(&magnitudes[a])
                    .unwrap()
                    .then(a.cmp(&b))
            });
        }
        ClusterResult {
            labels,
            method,
            seeds,
        }
    }
}

/// Assigns labeled vertices to the nearest of the k sector angles 2πj/k
/// and relabels so group 0 holds the largest-magnitude vertex and group
/// indices advance along edge direction.
///
/// Vertices with magnitude below `mag_threshold` (or exactly zero) become
/// noise. The edge-direction pass votes over labeled-to-labeled edges on
/// whether raw sector indices step by +1 or −1 per edge; either way the
/// final labels satisfy "out-neighbors of group j sit in group j+1 mod k"
/// for the majority of edges, which makes the labeling independent of
/// whether the eigenvalue was θ_{1,k} or its conjugate.
pub fn sector_classify(
    g: &Digraph,
    e: &PlanarEmbedding,
    k: usize,
    mag_threshold: f64,
) -> Result<ClusterResult, EmbedError> {
    assert!(k >= 2, "cycle length must be at least 2");
    assert!(mag_threshold >= 0.0);
    assert_eq!(g.n(), e.n(), "graph and embedding disagree on vertex count");
    if e.n() == 0 {
        return Err(EmbedError::EmptyEmbedding);
    }

    let mags = e.magnitudes();
    let raw: Vec<Option<usize>> = (0..e.n())
        .map(|i| {
            if mags[i] < mag_threshold || mags[i] == 0.0 {
                None
            } else {
                Some(nearest_sector(e.angle(i), k))
            }
        })
        .collect();

    // Orientation vote: does the raw sector index advance by +1 or by
    // k−1 along edges? Both are self-inverse multipliers mod k.
    let mut forward = 0usize;
    let mut backward = 0usize;
    for (u, v) in g.edges() {
        if let (Some(su), Some(sv)) = (raw[u], raw[v]) {
            let delta = (sv + k - su) % k;
            if delta == 1 {
                forward += 1;
            } else if delta == k - 1 {
                backward += 1;
            }
        }
    }
    let sigma = if backward > forward { k - 1 } else { 1 };

    // Anchor: largest-magnitude labeled vertex lands in group 0.
    let anchor = (0..e.n())
        .filter(|&i| raw[i].is_some())
        .max_by(|&a, &b| mags[a].partial_cmp(&mags[b]).unwrap().then(b.cmp(&a)));
    let anchor_sector = anchor.and_then(|i| raw[i]).unwrap_or(0);

    let labels: Vec<Option<usize>> = raw
        .iter()
        .map(|s| s.map(|s| sigma * ((s + k - anchor_sector) % k) % k))
        .collect();
    Ok(ClusterResult::from_labels(
        labels,
        &mags,
        ClusterMethod::Sector,
        k,
    ))
}

/// Index j minimizing circular distance from `angle` to 2πj/k, smallest
/// j on boundary ties.
fn nearest_sector(angle: f64, k: usize) -> usize {
    let mut best = 0;
    let mut best_d = f64::MAX;
    for j in 0..k {
        let c = TWO_PI * j as f64 / k as f64;
        let raw = (angle - c).abs() % TWO_PI;
        let d = raw.min(TWO_PI - raw);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

/// Density-based clustering with the Euclidean metric. Neighborhoods are
/// closed balls including the point itself; clusters grow from core
/// points in ascending index order through a FIFO frontier, so the
/// labeling is a pure function of the input order.
pub fn dbscan(points: &[(f64, f64)], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    assert!(eps > 0.0);
    assert!(min_pts >= 1);
    let n = points.len();
    let eps2 = eps * eps;
    let neighbors = |p: usize| -> Vec<usize> {
        let (px, py) = points[p];
        (0..n)
            .filter(|&q| {
                let (qx, qy) = points[q];
                (px - qx).powi(2) + (py - qy).powi(2) <= eps2
            })
            .collect()
    };

    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut cluster = 0usize;
    for p in 0..n {
        if visited[p] {
            continue;
        }
        visited[p] = true;
        let seed = neighbors(p);
        if seed.len() < min_pts {
            continue;
        }
        labels[p] = Some(cluster);
        let mut frontier: std::collections::VecDeque<usize> = seed.into();
        while let Some(q) = frontier.pop_front() {
            if labels[q].is_none() {
                // Covers fresh points and earlier noise claimed as border.
                labels[q] = Some(cluster);
            }
            if !visited[q] {
                visited[q] = true;
                let reach = neighbors(q);
                if reach.len() >= min_pts {
                    frontier.extend(reach);
                }
            }
        }
        cluster += 1;
    }
    labels
}

/// dbscan over an embedding's coordinates, wrapped with magnitude-sorted
/// seed lists.
pub fn dbscan_cluster(e: &PlanarEmbedding, eps: f64, min_pts: usize) -> ClusterResult {
    let labels = dbscan(&e.coords, eps, min_pts);
    let groups = labels.iter().flatten().max().map_or(0, |m| m + 1);
    ClusterResult::from_labels(labels, &e.magnitudes(), ClusterMethod::Dbscan, groups)
}

/// Each group's `m` largest-magnitude members, fewer when a group is
/// smaller.
pub fn extract_seeds(c: &ClusterResult, e: &PlanarEmbedding, m: usize) -> Vec<Vec<usize>> {
    assert!(m >= 1);
    assert_eq!(c.labels.len(), e.n());
    c.seeds
        .iter()
        .map(|group| group.iter().take(m).copied().collect())
        .collect()
}

/// Empirical check of the magnitude decay guarantee at the embedding's
/// peak: every labeled out-neighbor of the largest-magnitude labeled
/// vertex should carry magnitude at least (1−ε)·p_root − 1e-8, where
/// ε = |λ − θ_{1,k}|. Meaningful for right-side embeddings, whose
/// eigenvector averages over out-neighborhoods.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecayCheck {
    pub root: usize,
    pub epsilon: f64,
    pub bound: f64,
    pub checked: usize,
    pub violations: usize,
    /// min over checked neighbors of p_j / p_root; ∞ when none checked.
    pub min_neighbor_ratio: f64,
    pub passed: bool,
}

pub fn decay_check(
    g: &Digraph,
    e: &PlanarEmbedding,
    labels: &[Option<usize>],
) -> Option<DecayCheck> {
    assert_eq!(g.n(), e.n());
    assert_eq!(labels.len(), e.n());
    let mags = e.magnitudes();
    let root = (0..e.n())
        .filter(|&i| labels[i].is_some())
        .max_by(|&a, &b| mags[a].partial_cmp(&mags[b]).unwrap().then(b.cmp(&a)))?;
    let theta = Complex64::from_polar(1.0, TWO_PI / e.k as f64);
    let epsilon = (e.lambda - theta).norm();
    let bound = (1.0 - epsilon) * mags[root] - 1e-8;

    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut min_ratio = f64::INFINITY;
    for &j in g.out_neighbors(root) {
        if labels[j].is_none() {
            continue;
        }
        checked += 1;
        if mags[j] < bound {
            violations += 1;
        }
        if mags[root] > 0.0 {
            min_ratio = min_ratio.min(mags[j] / mags[root]);
        }
    }
    Some(DecayCheck {
        root,
        epsilon,
        bound,
        checked,
        violations,
        min_neighbor_ratio: min_ratio,
        passed: violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TransitionMatrix;
    use crate::sbm;
    use crate::spectral::{nearest_eigenpair, RootTarget, Side, SolverConfig};

    fn pure_pair(group_size: usize, rho: f64, seed: u64) -> (Digraph, Vec<usize>, EigenPair) {
        let spec = sbm::pure_3cyclic(group_size, rho);
        let (g, truth) = spec.sample(seed).unwrap();
        let b = TransitionMatrix::from_graph(&g).unwrap();
        let pair = nearest_eigenpair(
            &b,
            RootTarget::new(1, 3).unwrap(),
            Side::Both,
            &SolverConfig::default(),
        )
        .unwrap();
        (g, truth.membership, pair)
    }

    #[test]
    fn pure_right_embedding_is_three_points() {
        let (_, membership, pair) = pure_pair(6, 1.0, 11);
        let e = embed(&pair, Side::Right, 3).unwrap();
        let want = [TWO_PI / 3.0, 2.0 * TWO_PI / 3.0, TWO_PI];
        for i in 0..e.n() {
            let a = e.angle(i);
            let d = want
                .iter()
                .map(|w| {
                    let r = (a - w).abs() % TWO_PI;
                    r.min(TWO_PI - r)
                })
                .fold(f64::MAX, f64::min);
            assert!(d <= 1e-8, "vertex {i} at angle {a}");
        }
        // Same block, same point; equal magnitudes throughout.
        let m0 = e.magnitude(0);
        for i in 0..e.n() {
            assert!((e.magnitude(i) - m0).abs() <= 1e-9);
            for j in 0..e.n() {
                if membership[i] == membership[j] {
                    let d = (e.coords[i].0 - e.coords[j].0).hypot(e.coords[i].1 - e.coords[j].1);
                    assert!(d <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn pure_left_embedding_is_three_rays() {
        let (_, membership, pair) = pure_pair(8, 0.7, 5);
        let e = embed(&pair, Side::Left, 3).unwrap();
        // Same block, same angle; magnitudes spread within blocks.
        for i in 0..e.n() {
            for j in (i + 1)..e.n() {
                if membership[i] == membership[j] {
                    let r = (e.angle(i) - e.angle(j)).abs() % TWO_PI;
                    assert!(r.min(TWO_PI - r) <= 1e-7, "vertices {i},{j}");
                }
            }
        }
        let mags = e.magnitudes();
        let spread = mags.iter().cloned().fold(f64::MIN, f64::max)
            - mags.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread > 1e-4, "left magnitudes should vary, spread {spread}");
    }

    #[test]
    fn missing_side_and_both_are_errors() {
        let (_, _, mut pair) = pure_pair(4, 1.0, 1);
        assert_eq!(embed(&pair, Side::Both, 3).unwrap_err(), EmbedError::BothSides);
        pair.left = None;
        assert_eq!(
            embed(&pair, Side::Left, 3).unwrap_err(),
            EmbedError::MissingSide { side: Side::Left }
        );
    }

    #[test]
    fn real_eigenvalue_embeds_on_axis() {
        let g = Digraph::from_edge_list(&[(0, 1), (1, 0), (1, 2), (2, 0)], None).unwrap();
        let b = TransitionMatrix::from_graph(&g).unwrap();
        let pair = nearest_eigenpair(
            &b,
            RootTarget::new(0, 1).unwrap(),
            Side::Right,
            &SolverConfig::default(),
        )
        .unwrap();
        let e = embed(&pair, Side::Right, 3).unwrap();
        for (_, y) in &e.coords {
            assert!(y.abs() <= 1e-10);
        }
    }

    #[test]
    fn sector_recovers_pure_blocks_up_to_rotation() {
        let (g, membership, pair) = pure_pair(7, 0.85, 23);
        let e = embed(&pair, Side::Right, 3).unwrap();
        let c = sector_classify(&g, &e, 3, 0.0).unwrap();
        let rotation_fits = (0..3).any(|r| {
            membership
                .iter()
                .zip(&c.labels)
                .all(|(&t, l)| *l == Some((t + r) % 3))
        });
        assert!(rotation_fits, "labels are not a rotation of ground truth");
        // Every sector holds exactly one block.
        assert_eq!(c.group_count(), 3);
        for group in &c.seeds {
            assert_eq!(group.len(), 7);
        }
    }

    #[test]
    fn sector_groups_follow_edge_direction() {
        let (g, _, pair) = pure_pair(6, 0.9, 41);
        let e = embed(&pair, Side::Right, 3).unwrap();
        let c = sector_classify(&g, &e, 3, 0.0).unwrap();
        for (u, v) in g.edges() {
            let (Some(gu), Some(gv)) = (c.labels[u], c.labels[v]) else {
                continue;
            };
            assert_eq!(gv, (gu + 1) % 3, "edge {u}->{v}");
        }
    }

    #[test]
    fn conjugate_pair_gives_same_labels() {
        // Orientation correction makes the labeling invariant under
        // conjugation: both eigenvalues describe the same cyclic order.
        let (g, _, pair) = pure_pair(6, 0.8, 9);
        let conj = EigenPair {
            lambda: pair.lambda.conj(),
            right: pair.right.as_ref().map(|v| v.iter().map(|z| z.conj()).collect()),
            left: None,
            right_residual: pair.right_residual,
            left_residual: None,
        };
        let e = embed(&pair, Side::Right, 3).unwrap();
        let ec = embed(&conj, Side::Right, 3).unwrap();
        let c = sector_classify(&g, &e, 3, 0.0).unwrap();
        let cc = sector_classify(&g, &ec, 3, 0.0).unwrap();
        assert_eq!(c.labels, cc.labels);
    }

    #[test]
    fn sector_equals_bfs_partition_up_to_rotation() {
        let (g, _, pair) = pure_pair(5, 1.0, 2);
        let e = embed(&pair, Side::Right, 3).unwrap();
        let c = sector_classify(&g, &e, 3, 0.0).unwrap();
        let bfs = g.bfs_cyclic_partition(3).unwrap().unwrap();
        let mut bfs_label = vec![0usize; g.n()];
        for (cls, members) in bfs.iter().enumerate() {
            for &v in members {
                bfs_label[v] = cls;
            }
        }
        let fits = (0..3).any(|r| {
            bfs_label
                .iter()
                .zip(&c.labels)
                .all(|(&t, l)| *l == Some((t + r) % 3))
        });
        assert!(fits);
    }

    #[test]
    fn threshold_sends_small_magnitudes_to_noise() {
        let e = PlanarEmbedding {
            coords: vec![(1.0, 0.0), (0.01, 0.0), (-0.5, 0.5)],
            lambda: Complex64::from_polar(1.0, TWO_PI / 3.0),
            side: Side::Right,
            k: 3,
        };
        let g = Digraph::from_edge_list(&[(0, 1), (1, 2), (2, 0)], None).unwrap();
        let c = sector_classify(&g, &e, 3, 0.25).unwrap();
        assert_eq!(c.labels[1], None);
        assert!(c.labels[0].is_some() && c.labels[2].is_some());
    }

    #[test]
    fn zero_coords_are_all_noise() {
        let e = PlanarEmbedding {
            coords: vec![(0.0, 0.0); 4],
            lambda: Complex64::ONE,
            side: Side::Right,
            k: 3,
        };
        let g = Digraph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)], None).unwrap();
        let c = sector_classify(&g, &e, 3, 0.0).unwrap();
        assert!(c.labels.iter().all(|l| l.is_none()));
    }

    #[test]
    fn empty_embedding_is_an_error() {
        let e = PlanarEmbedding {
            coords: vec![],
            lambda: Complex64::ONE,
            side: Side::Right,
            k: 3,
        };
        let g = Digraph::from_edge_list(&[], Some(0)).unwrap();
        assert_eq!(
            sector_classify(&g, &e, 3, 0.0).unwrap_err(),
            EmbedError::EmptyEmbedding
        );
    }

    #[test]
    fn dbscan_two_blobs() {
        let mut points = Vec::new();
        for i in 0..10 {
            points.push((i as f64 * 0.01, 0.0));
        }
        for i in 0..10 {
            points.push((5.0 + i as f64 * 0.01, 0.0));
        }
        let labels = dbscan(&points, 0.1, 3);
        assert!(labels.iter().all(|l| l.is_some()));
        assert_eq!(labels[0], Some(0));
        assert_eq!(labels[10], Some(1));
        assert!(labels[..10].iter().all(|l| *l == Some(0)));
        assert!(labels[10..].iter().all(|l| *l == Some(1)));
    }

    #[test]
    fn dbscan_single_point_is_noise() {
        assert_eq!(dbscan(&[(0.0, 0.0)], 1.0, 2), vec![None]);
    }

    #[test]
    fn dbscan_border_point_claimed_by_first_cluster() {
        // Chain with a gap: the middle point is density-reachable but not
        // core; it joins the cluster that reaches it first.
        let points = [(0.0, 0.0), (0.9, 0.0), (1.8, 0.0), (10.0, 0.0)];
        let labels = dbscan(&points, 1.0, 3);
        assert_eq!(labels[0], Some(0));
        assert_eq!(labels[1], Some(0));
        assert_eq!(labels[2], Some(0));
        assert_eq!(labels[3], None);
    }

    #[test]
    fn seeds_sorted_by_descending_magnitude() {
        let (g, _, pair) = pure_pair(8, 0.7, 5);
        let e = embed(&pair, Side::Left, 3).unwrap();
        let c = sector_classify(&g, &e, 3, 0.0).unwrap();
        for group in &c.seeds {
            for w in group.windows(2) {
                assert!(e.magnitude(w[0]) >= e.magnitude(w[1]));
            }
        }
        let top = extract_seeds(&c, &e, 2);
        assert_eq!(top.len(), 3);
        for (full, t) in c.seeds.iter().zip(&top) {
            assert_eq!(&full[..2], t.as_slice());
        }
    }

    #[test]
    fn decay_holds_on_pure_sample() {
        let (g, _, pair) = pure_pair(10, 0.8, 3);
        let e = embed(&pair, Side::Right, 3).unwrap();
        let c = sector_classify(&g, &e, 3, 0.0).unwrap();
        let check = decay_check(&g, &e, &c.labels).unwrap();
        // Exact eigenvalue at the root of unity: ε ≈ 0 and magnitudes
        // are constant, so every neighbor clears the bound.
        assert!(check.epsilon <= 1e-8);
        assert!(check.passed, "violations {}", check.violations);
        assert!(check.checked > 0);
        assert!(check.min_neighbor_ratio >= 1.0 - 1e-6);
    }
}
