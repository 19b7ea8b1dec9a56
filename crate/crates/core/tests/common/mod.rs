//! Helpers shared by the integration suites.

use std::collections::VecDeque;

use cyclescope::Digraph;

pub fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

pub fn unit_f64(state: &mut u64) -> f64 {
    (splitmix(state) >> 11) as f64 / (1u64 << 53) as f64
}

/// Clustered points with background scatter, deterministic in `seed`.
pub fn blob_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let centers = [(0.2, 0.2), (0.8, 0.3), (0.5, 0.85)];
    let mut state = seed;
    (0..n)
        .map(|i| {
            if i % 4 == 3 {
                (unit_f64(&mut state), unit_f64(&mut state))
            } else {
                let (cx, cy) = centers[i % 3];
                (
                    cx + 0.08 * (unit_f64(&mut state) - 0.5),
                    cy + 0.08 * (unit_f64(&mut state) - 0.5),
                )
            }
        })
        .collect()
}

/// Textbook density clustering over a precomputed distance matrix, kept
/// to the same deterministic policy as the library: cores claimed in
/// ascending index order, frontier expanded first-in first-out.
pub fn dbscan_reference(points: &[(f64, f64)], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let mut dist = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            dist[i][j] = (dx * dx + dy * dy).sqrt();
        }
    }
    let neighborhood =
        |i: usize| -> Vec<usize> { (0..n).filter(|&j| dist[i][j] <= eps).collect() };
    let is_core: Vec<bool> = (0..n).map(|i| neighborhood(i).len() >= min_pts).collect();

    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut cluster = 0usize;
    for start in 0..n {
        if visited[start] || !is_core[start] {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        labels[start] = Some(cluster);
        while let Some(p) = queue.pop_front() {
            if !is_core[p] {
                continue;
            }
            for q in neighborhood(p) {
                if labels[q].is_none() {
                    labels[q] = Some(cluster);
                }
                if !visited[q] {
                    visited[q] = true;
                    if is_core[q] {
                        queue.push_back(q);
                    }
                }
            }
        }
        cluster += 1;
    }
    labels
}

/// Random digraph dense enough to be strongly connected at moderate n.
pub fn random_digraph(n: usize, p: f64, state: &mut u64) -> Digraph {
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && unit_f64(state) < p {
                    edges.push((u, v));
                }
            }
        }
        let g = Digraph::from_edge_list(&edges, Some(n)).unwrap();
        if g.strongly_connected_components().component_count() == 1 {
            return g;
        }
    }
}
