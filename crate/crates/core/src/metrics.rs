//! Agreement between predicted groupings and generator ground truth:
//! adjusted Rand index, rotation-aligned confusion counts, coverage of
//! the cyclic region, and false positives outside it.

use std::collections::HashMap;

use serde::Serialize;

fn comb2(x: usize) -> f64 {
    (x as f64) * (x as f64 - 1.0) / 2.0
}

/// Chance-corrected partition agreement in [−1, 1]. Labels are opaque;
/// any relabeling of either side leaves the value unchanged. Empty input
/// is vacuously perfect.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    let mut cells: HashMap<(usize, usize), usize> = HashMap::new();
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut cols: HashMap<usize, usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *cells.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let sum_cells: f64 = cells.values().map(|&c| comb2(c)).sum();
    let sum_rows: f64 = rows.values().map(|&c| comb2(c)).sum();
    let sum_cols: f64 = cols.values().map(|&c| comb2(c)).sum();
    let expected = sum_rows * sum_cols / comb2(n);
    let maximum = 0.5 * (sum_rows + sum_cols);
    let numerator = sum_cells - expected;
    let denominator = maximum - expected;
    if denominator.abs() < 1e-12 {
        // Both partitions degenerate the same way (e.g. single cluster).
        if numerator.abs() < 1e-12 { 1.0 } else { 0.0 }
    } else {
        numerator / denominator
    }
}

/// Recovery of a k-class cyclic ground truth by a labeling with noise.
/// The confusion matrix is k×(k+1): truth classes by aligned predicted
/// groups, with a trailing noise column; row t sums to the size of truth
/// class t.
///
/// When the labeling uses at most k group ids they are treated as cycle
/// positions and aligned by the best cyclic rotation. A labeling with
/// more groups (density clustering also finds non-cyclic mass) instead
/// gets an injective best-overlap assignment of truth classes to groups;
/// unassigned groups fold into the noise column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryMetrics {
    /// Over the cyclic region, raw labels, noise as one extra class.
    pub adjusted_rand_index: f64,
    /// Over the labeled (non-noise) part of the region only.
    pub ari_excluding_noise: f64,
    pub confusion: Vec<Vec<usize>>,
    /// Fraction of region vertices recovered into one of the k aligned
    /// groups; mass folded into the noise column does not count.
    pub coverage: f64,
    /// Vertices outside the region assigned to an aligned group.
    pub false_positives: usize,
    /// Cyclic rotation applied to predicted groups for the confusion
    /// diagonal; group labels only fix the cycle up to rotation. Zero
    /// when assignment alignment was used instead.
    pub rotation: usize,
    pub region_size: usize,
}

/// `truth_classes[t]` lists the vertices of cyclic class t; `predicted`
/// covers every vertex of the graph.
pub fn recovery_metrics(
    truth_classes: &[Vec<usize>],
    predicted: &[Option<usize>],
) -> RecoveryMetrics {
    let k = truth_classes.len();
    assert!(k >= 1);
    let n = predicted.len();
    let mut truth_of = vec![usize::MAX; n];
    for (t, class) in truth_classes.iter().enumerate() {
        for &v in class {
            assert!(v < n, "truth vertex {v} outside the labeled space");
            truth_of[v] = t;
        }
    }
    let groups = predicted.iter().flatten().max().map_or(0, |m| m + 1);

    let region: Vec<usize> = (0..n).filter(|&v| truth_of[v] != usize::MAX).collect();
    let labeled_region: Vec<usize> = region
        .iter()
        .copied()
        .filter(|&v| predicted[v].is_some())
        .collect();

    // aligned[p] is the truth class recovered by predicted group p, or
    // usize::MAX for groups folded into noise.
    let (aligned, rotation) = if groups <= k {
        // Best cyclic rotation by diagonal mass; ties keep the smallest.
        let mut rotation = 0;
        let mut best_diag = 0;
        for r in 0..k {
            let diag = labeled_region
                .iter()
                .filter(|&&v| (predicted[v].unwrap() + r) % k == truth_of[v])
                .count();
            if r == 0 || diag > best_diag {
                best_diag = diag;
                rotation = r;
            }
        }
        let aligned: Vec<usize> = (0..groups).map(|p| (p + rotation) % k).collect();
        (aligned, rotation)
    } else {
        let mut overlap = vec![vec![0usize; groups]; k];
        for &v in &labeled_region {
            overlap[truth_of[v]][predicted[v].unwrap()] += 1;
        }
        // Square cost with zero dummy rows so every truth class takes
        // the group it overlaps most, jointly.
        let mut cost = vec![vec![0.0; groups]; groups];
        for (t, row) in overlap.iter().enumerate() {
            for (p, &c) in row.iter().enumerate() {
                cost[t][p] = -(c as f64);
            }
        }
        let assignment = crate::linalg::min_cost_assignment(&cost);
        let mut aligned = vec![usize::MAX; groups];
        for (t, &p) in assignment.iter().enumerate().take(k) {
            aligned[p] = t;
        }
        (aligned, 0)
    };

    let mut confusion = vec![vec![0usize; k + 1]; k];
    for &v in &region {
        let column = match predicted[v] {
            Some(p) if aligned[p] != usize::MAX => aligned[p],
            _ => k,
        };
        confusion[truth_of[v]][column] += 1;
    }

    let truth_vec: Vec<usize> = region.iter().map(|&v| truth_of[v]).collect();
    let pred_with_noise: Vec<usize> = region
        .iter()
        .map(|&v| predicted[v].unwrap_or(groups))
        .collect();
    let adjusted = adjusted_rand_index(&truth_vec, &pred_with_noise);

    let truth_labeled: Vec<usize> = labeled_region.iter().map(|&v| truth_of[v]).collect();
    let pred_labeled: Vec<usize> = labeled_region
        .iter()
        .map(|&v| predicted[v].unwrap())
        .collect();
    let ari_excluding_noise = adjusted_rand_index(&truth_labeled, &pred_labeled);

    let false_positives = (0..n)
        .filter(|&v| {
            truth_of[v] == usize::MAX
                && predicted[v].is_some_and(|p| aligned[p] != usize::MAX)
        })
        .count();
    let recovered: usize = (0..k).map(|t| confusion[t][..k].iter().sum::<usize>()).sum();
    let coverage = if region.is_empty() {
        0.0
    } else {
        recovered as f64 / region.len() as f64
    };

    RecoveryMetrics {
        adjusted_rand_index: adjusted,
        ari_excluding_noise,
        confusion,
        coverage,
        false_positives,
        rotation,
        region_size: region.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_recovery() {
        let truth = vec![vec![0, 1], vec![2, 3], vec![4, 5]];
        let predicted: Vec<Option<usize>> =
            vec![Some(0), Some(0), Some(1), Some(1), Some(2), Some(2)];
        let m = recovery_metrics(&truth, &predicted);
        assert_eq!(m.adjusted_rand_index, 1.0);
        assert_eq!(m.ari_excluding_noise, 1.0);
        assert_eq!(m.coverage, 1.0);
        assert_eq!(m.false_positives, 0);
        assert_eq!(m.rotation, 0);
        for (t, row) in m.confusion.iter().enumerate() {
            assert_eq!(row[t], 2);
            assert_eq!(row.iter().sum::<usize>(), truth[t].len());
        }
    }

    #[test]
    fn rotated_labels_align() {
        let truth = vec![vec![0, 1], vec![2, 3], vec![4, 5]];
        // Predicted group = truth + 1 mod 3; rotation 2 restores it.
        let predicted: Vec<Option<usize>> =
            vec![Some(1), Some(1), Some(2), Some(2), Some(0), Some(0)];
        let m = recovery_metrics(&truth, &predicted);
        assert_eq!(m.adjusted_rand_index, 1.0);
        assert_eq!(m.rotation, 2);
        for (t, row) in m.confusion.iter().enumerate() {
            assert_eq!(row[t], 2, "row {t}: {row:?}");
        }
    }

    #[test]
    fn noise_and_false_positives_counted() {
        let truth = vec![vec![0, 1], vec![2, 3]];
        // Vertex 1 noise, vertices 4 and 5 outside the region, 5 labeled.
        let predicted: Vec<Option<usize>> =
            vec![Some(0), None, Some(1), Some(1), None, Some(0)];
        let m = recovery_metrics(&truth, &predicted);
        assert_eq!(m.coverage, 0.75);
        assert_eq!(m.false_positives, 1);
        assert_eq!(m.confusion[0][2], 1);
        assert_eq!(m.ari_excluding_noise, 1.0);
        assert!(m.adjusted_rand_index < 1.0);
        assert_eq!(m.region_size, 4);
        for (t, row) in m.confusion.iter().enumerate() {
            assert_eq!(row.iter().sum::<usize>(), truth[t].len());
        }
    }

    #[test]
    fn all_noise_has_zero_coverage() {
        let truth = vec![vec![0], vec![1], vec![2]];
        let predicted = vec![None, None, None];
        let m = recovery_metrics(&truth, &predicted);
        assert_eq!(m.coverage, 0.0);
        assert_eq!(m.false_positives, 0);
        for (t, row) in m.confusion.iter().enumerate() {
            assert_eq!(row[3], 1, "row {t}");
        }
    }

    #[test]
    fn extra_groups_fold_into_noise() {
        // Classes 0..2 recovered by groups 1, 3, 0; group 2 is a blob of
        // non-cyclic mass that also swallows one region vertex.
        let truth = vec![vec![0, 1], vec![2, 3, 4], vec![5, 6]];
        let predicted: Vec<Option<usize>> = vec![
            Some(1),
            Some(1),
            Some(3),
            Some(3),
            Some(2),
            Some(0),
            Some(0),
            Some(2),
            Some(2),
            None,
        ];
        let m = recovery_metrics(&truth, &predicted);
        assert_eq!(m.rotation, 0);
        assert_eq!(m.confusion[0], vec![2, 0, 0, 0]);
        assert_eq!(m.confusion[1], vec![0, 2, 0, 1]);
        assert_eq!(m.confusion[2], vec![0, 0, 2, 0]);
        assert_eq!(m.false_positives, 0);
        assert!((m.coverage - 6.0 / 7.0).abs() < 1e-12);
        for (t, row) in m.confusion.iter().enumerate() {
            assert_eq!(row.iter().sum::<usize>(), truth[t].len());
        }
    }

    #[test]
    fn aligned_group_outside_region_is_false_positive() {
        let truth = vec![vec![0], vec![1], vec![2]];
        // Group 0 matches class 0 but also claims vertex 3; group 3 is
        // unmatched mass on vertex 4.
        let predicted: Vec<Option<usize>> =
            vec![Some(0), Some(1), Some(2), Some(0), Some(3)];
        let m = recovery_metrics(&truth, &predicted);
        assert_eq!(m.false_positives, 1);
        assert_eq!(m.coverage, 1.0);
    }

    #[test]
    fn ari_invariant_under_relabeling() {
        let a = vec![0, 0, 1, 1, 2, 2, 2];
        let b = vec![5, 5, 9, 9, 1, 1, 1];
        assert_eq!(adjusted_rand_index(&a, &b), 1.0);
    }

    #[test]
    fn ari_of_random_labels_is_near_zero() {
        // splitmix-style mixing keeps the test deterministic.
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = move || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            (z ^ (z >> 31)) as usize
        };
        let truth: Vec<usize> = (0..480).map(|i| i % 3).collect();
        for _ in 0..5 {
            let random: Vec<usize> = (0..480).map(|_| next() % 3).collect();
            let ari = adjusted_rand_index(&truth, &random);
            assert!(ari.abs() < 0.05, "ari {ari}");
        }
    }

    #[test]
    fn ari_disagreement_is_negative_or_small() {
        // Perfectly anti-aligned two-block split on four points.
        let a = vec![0, 0, 1, 1];
        let b = vec![0, 1, 0, 1];
        let ari = adjusted_rand_index(&a, &b);
        assert!(ari < 0.0, "ari {ari}");
    }

    #[test]
    fn empty_input_is_vacuously_perfect() {
        assert_eq!(adjusted_rand_index(&[], &[]), 1.0);
    }
}
