//! Closed-form spectral and embedding bounds for perturbed k-cyclic
//! structure, plus an empirical verifier that measures a sample against
//! them.
//!
//! All evaluators are pure functions of degrees and the eigenvalue
//! displacement ε = |λ − θ_{1,k}|.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::embed::{self, DecayCheck, PlanarEmbedding, TWO_PI};
use crate::graph::Digraph;
use crate::linalg;
use crate::sbm::GroundTruth;
use crate::spectral::EigenPair;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("degree slices differ in length: {d_len} vs {d_hat_len}")]
    DimensionMismatch { d_len: usize, d_hat_len: usize },
    #[error("degree {d} is too small; the rate needs d >= 2")]
    DegreeTooSmall { d: usize },
    #[error("ground truth has no cyclic group of length {k}")]
    MissingGroundTruth { k: usize },
}

/// |y*x| ≥ n^(−1/4) for unit left and right eigenvectors at a root of
/// unity on a strongly connected k-cyclic graph with n vertices.
pub fn overlap_lower_bound(n_cyclic: usize) -> f64 {
    assert!(n_cyclic >= 1);
    (n_cyclic as f64).powf(-0.25)
}

/// Eigenvalue displacement bound under noise outside the cyclic pattern,
/// split into its terms. The stated first-order coefficient is 2·C^(1/4);
/// `first_order_half` drops the leading 2, a variant that appears in
/// worked estimates, and both are reported rather than silently choosing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationBound {
    pub first_order: f64,
    pub first_order_half: f64,
    /// (2·max_i (d̂_i − d_i)/d̂_i)², the quadratic remainder scale.
    pub higher_order: f64,
}

impl PerturbationBound {
    pub fn total(&self) -> f64 {
        self.first_order + self.higher_order
    }
}

/// `c` is the cyclic-region size, `d` the per-vertex out-degrees within
/// the pattern, `d_hat` the observed out-degrees. Requires d̂_i ≥ d_i ≥ 1.
pub fn perturbation_bound(
    c: usize,
    d: &[f64],
    d_hat: &[f64],
) -> Result<PerturbationBound, BoundsError> {
    if d.len() != d_hat.len() {
        return Err(BoundsError::DimensionMismatch {
            d_len: d.len(),
            d_hat_len: d_hat.len(),
        });
    }
    let mut worst = 0.0f64;
    for (&di, &dh) in d.iter().zip(d_hat) {
        assert!(dh >= di && di >= 1.0, "need d_hat >= d >= 1 per vertex");
        worst = worst.max((dh - di) / dh);
    }
    let root = (c as f64).powf(0.25);
    Ok(PerturbationBound {
        first_order: 2.0 * root * worst,
        first_order_half: root * worst,
        higher_order: (2.0 * worst).powi(2),
    })
}

/// The two magnitude decay rates per step away from the peak vertex:
/// the simple rate 1−ε, and the degree-aware
/// γ = 1 − ε·(d + (1−ε)⁻¹)/(d−1), which is strictly smaller for ε > 0.
pub fn decay_rates(epsilon: f64, d: usize) -> Result<(f64, f64), BoundsError> {
    assert!((0.0..1.0).contains(&epsilon));
    if d <= 1 {
        return Err(BoundsError::DegreeTooSmall { d });
    }
    let simple = 1.0 - epsilon;
    let gamma = 1.0 - epsilon * (d as f64 + simple.recip()) / (d as f64 - 1.0);
    Ok((simple, gamma))
}

/// cos δ in the phase deviation bound, clamped to [−1, 1]. The raw value
/// (0.0199 − 1.98·d(1−ε)) / (2·d(1−ε)) lies above −0.99 for any valid
/// input, so only the upper clamp can engage (at tiny d(1−ε)).
fn phase_cosine_argument(d: usize, epsilon: f64) -> f64 {
    let x = d as f64 * (1.0 - epsilon);
    ((0.0199 - 1.98 * x) / (2.0 * x)).clamp(-1.0, 1.0)
}

/// Largest angular deviation of the per-edge phase change from 2π/k, in
/// radians.
pub fn phase_deviation(d: usize, epsilon: f64) -> f64 {
    assert!(d >= 1);
    assert!((0.0..1.0).contains(&epsilon));
    phase_cosine_argument(d, epsilon).acos()
}

/// Radius of the circle containing vertices at the given edge depth from
/// the peak, in embedding units of the peak magnitude:
/// r² = 1 + γ^{2·depth} − 2·γ^depth·cos δ. Decreasing in depth toward 1
/// when γ < 1 (the bound is weakest at the peak itself).
pub fn embedding_radius(d_max: usize, epsilon: f64, depth: usize) -> Result<f64, BoundsError> {
    let (_, gamma) = decay_rates(epsilon, d_max)?;
    let c = phase_cosine_argument(d_max, epsilon);
    let gk = gamma.powi(depth as i32);
    Ok((1.0 + gk * gk - 2.0 * gk * c).sqrt())
}

/// Bound evaluations next to the measurements they constrain, for one
/// eigenpair against one ground-truth cyclic group.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub k: usize,
    /// |λ − θ_{1,k}| measured.
    pub epsilon: f64,
    pub cyclic_size: usize,
    /// Vertices of the cyclic region, with their in-pattern out-degrees
    /// `d` and observed out-degrees `d_hat`, index-aligned.
    pub region: Vec<usize>,
    pub d: Vec<usize>,
    pub d_hat: Vec<usize>,
    pub d_max: usize,
    pub overlap_lower: f64,
    /// |y*x| when the pair carries both vectors.
    pub overlap_measured: Option<f64>,
    pub overlap_ok: Option<bool>,
    pub perturbation: PerturbationBound,
    pub epsilon_within_first_order: bool,
    pub epsilon_within_total: bool,
    pub decay_simple: f64,
    pub gamma: f64,
    pub phase_dev: f64,
    pub radius_at_depth: BTreeMap<usize, f64>,
    pub decay: Option<DecayCheck>,
}

/// Measures a sample's eigenpair and embedding against every bound.
///
/// The cyclic region and the per-vertex in-pattern degrees come from the
/// generator's ground truth; the clean degrees are not recoverable from a
/// noisy sample alone. `g`, `truth`, `pair`, and `e` must share one
/// vertex space.
pub fn verify_bounds(
    g: &Digraph,
    truth: &GroundTruth,
    pair: &EigenPair,
    e: &PlanarEmbedding,
) -> Result<BoundsReport, BoundsError> {
    let k = e.k;
    assert_eq!(g.n(), e.n(), "graph and embedding disagree on vertex count");
    assert_eq!(g.n(), truth.membership.len());
    let group_index = truth
        .cyclic_groups
        .iter()
        .position(|cg| cg.k == k)
        .ok_or(BoundsError::MissingGroundTruth { k })?;
    let classes = truth.cycle_classes(group_index);

    // Position of each region vertex within its cyclic group.
    let mut position = vec![usize::MAX; g.n()];
    for (pos, class) in classes.iter().enumerate() {
        for &v in class {
            position[v] = pos;
        }
    }
    let mut region: Vec<usize> = (0..g.n()).filter(|&v| position[v] != usize::MAX).collect();
    region.sort_unstable();

    let mut d = Vec::with_capacity(region.len());
    let mut d_hat = Vec::with_capacity(region.len());
    for &v in &region {
        let next = (position[v] + 1) % k;
        let in_pattern = g
            .out_neighbors(v)
            .iter()
            .filter(|&&w| position[w] == next)
            .count();
        d.push(in_pattern);
        d_hat.push(g.out_degree(v));
    }
    let d_max = d_hat.iter().copied().max().unwrap_or(0);

    let theta = Complex64::from_polar(1.0, TWO_PI / k as f64);
    let epsilon = (pair.lambda - theta).norm();

    let c = region.len();
    let overlap_lower = overlap_lower_bound(c.max(1));
    let overlap_measured = match (&pair.left, &pair.right) {
        (Some(y), Some(x)) => Some(linalg::cdot(y, x).norm()),
        _ => None,
    };
    let overlap_ok = overlap_measured.map(|m| m >= overlap_lower);

    let df: Vec<f64> = d.iter().map(|&x| x as f64).collect();
    let dhf: Vec<f64> = d_hat.iter().map(|&x| x as f64).collect();
    let perturbation = perturbation_bound(c, &df, &dhf)?;

    let (decay_simple, gamma) = decay_rates(epsilon, d_max)?;
    let phase_dev = phase_deviation(d_max, epsilon);
    let radius_at_depth: BTreeMap<usize, f64> = (0..=3)
        .map(|depth| Ok((depth, embedding_radius(d_max, epsilon, depth)?)))
        .collect::<Result<_, BoundsError>>()?;

    // Decay measured over the region as the labeled set.
    let labels: Vec<Option<usize>> = (0..g.n())
        .map(|v| (position[v] != usize::MAX).then_some(position[v]))
        .collect();
    let decay = embed::decay_check(g, e, &labels);

    Ok(BoundsReport {
        k,
        epsilon,
        cyclic_size: c,
        region,
        d,
        d_hat,
        d_max,
        overlap_lower,
        overlap_measured,
        overlap_ok,
        perturbation,
        // Slack at solver precision keeps a zero bound on a clean sample
        // from failing on rounding-scale epsilon.
        epsilon_within_first_order: epsilon <= perturbation.first_order + 1e-9,
        epsilon_within_total: epsilon <= perturbation.total() + 1e-9,
        decay_simple,
        gamma,
        phase_dev,
        radius_at_depth,
        decay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TransitionMatrix;
    use crate::sbm;
    use crate::spectral::{nearest_eigenpair, RootTarget, Side, SolverConfig};

    #[test]
    fn overlap_values() {
        assert!((overlap_lower_bound(135) - 0.2933705789311311).abs() <= 1e-12);
        assert!((overlap_lower_bound(120) - 0.3021375397356768).abs() <= 1e-12);
        assert_eq!(overlap_lower_bound(1), 1.0);
    }

    #[test]
    fn perturbation_worked_example() {
        let d = vec![32.0; 120];
        let dh = vec![36.4; 120];
        let b = perturbation_bound(120, &d, &dh).unwrap();
        assert!((b.first_order - 0.8001595629915518).abs() <= 1e-12);
        assert!((b.first_order_half - 0.4000797814957759).abs() <= 1e-12);
        // The half variant rounds to 0.4001.
        assert!((b.first_order_half - 0.4001).abs() <= 5e-5);
        assert!((b.higher_order - 0.058447047458036486).abs() <= 1e-12);
        assert!((b.total() - (b.first_order + b.higher_order)).abs() <= 1e-15);
    }

    #[test]
    fn perturbation_edge_cases() {
        let b = perturbation_bound(1, &[1.0], &[2.0]).unwrap();
        assert!((b.first_order - 1.0).abs() <= 1e-15);
        let b = perturbation_bound(9, &[3.0, 4.0], &[3.0, 4.0]).unwrap();
        assert_eq!(b.first_order, 0.0);
        assert_eq!(b.higher_order, 0.0);
        assert_eq!(
            perturbation_bound(5, &[1.0], &[1.0, 2.0]).unwrap_err(),
            BoundsError::DimensionMismatch {
                d_len: 1,
                d_hat_len: 2
            }
        );
    }

    #[test]
    fn decay_rate_values() {
        let (simple, _) = decay_rates(0.1301, 46).unwrap();
        assert!((simple - 0.8699).abs() <= 1e-12);
        let (_, gamma) = decay_rates(0.0527, 277).unwrap();
        assert!((gamma - 0.9469074934940953).abs() <= 1e-12);
        let (s, g) = decay_rates(0.0, 10).unwrap();
        assert_eq!((s, g), (1.0, 1.0));
        assert_eq!(
            decay_rates(0.1, 1).unwrap_err(),
            BoundsError::DegreeTooSmall { d: 1 }
        );
    }

    #[test]
    fn gamma_below_simple_rate() {
        for d in [2usize, 3, 10, 50, 1000] {
            for eps in [1e-6, 0.01, 0.1, 0.5, 0.9] {
                let (simple, gamma) = decay_rates(eps, d).unwrap();
                assert!(gamma < simple, "d={d} eps={eps}: {gamma} vs {simple}");
            }
        }
    }

    #[test]
    fn phase_deviation_values() {
        assert!((phase_deviation(32, 0.1301) - 2.997541485686842).abs() <= 1e-12);
        assert!((phase_deviation(1, 0.0) - 2.941509226366713).abs() <= 1e-12);
        // Tiny effective degree pushes the raw argument above 1; the
        // clamp collapses the deviation to zero.
        assert_eq!(phase_deviation(1, 0.999), 0.0);
    }

    #[test]
    fn radius_values_and_monotonicity() {
        let r1 = embedding_radius(46, 0.1301, 1).unwrap();
        assert!((r1 - 1.8589298021768508).abs() <= 1e-12);
        assert!((r1 - 1.89).abs() <= 0.05);
        let r0 = embedding_radius(46, 0.1301, 0).unwrap();
        assert!((r0 - 1.9948690913099503).abs() <= 1e-12);
        // Decreasing toward 1 in depth while the cosine argument is
        // negative and gamma < 1.
        let mut prev = r0;
        for depth in 1..30 {
            let r = embedding_radius(46, 0.1301, depth).unwrap();
            assert!(r < prev, "depth {depth}");
            assert!(r >= 1.0 - 1e-12);
            prev = r;
        }
        assert!((embedding_radius(46, 0.1301, 200).unwrap() - 1.0).abs() <= 1e-10);
        assert_eq!(
            embedding_radius(1, 0.1, 1).unwrap_err(),
            BoundsError::DegreeTooSmall { d: 1 }
        );
    }

    #[test]
    fn radius_at_zero_depth_uses_unit_ring() {
        // depth 0 collapses gamma^depth to 1 regardless of epsilon.
        let r = embedding_radius(46, 0.0, 0).unwrap();
        let c = phase_cosine_argument(46, 0.0);
        assert!((r - (2.0 - 2.0 * c).sqrt()).abs() <= 1e-15);
    }

    fn analyzed_sample(
        spec: &sbm::BlockModelSpec,
        seed: u64,
        k: usize,
    ) -> (Digraph, GroundTruth, EigenPair, PlanarEmbedding) {
        let (g, truth) = spec.sample(seed).unwrap();
        let b = TransitionMatrix::from_graph(&g).unwrap();
        let pair = nearest_eigenpair(
            &b,
            RootTarget::new(1, k as u32).unwrap(),
            Side::Both,
            &SolverConfig::default(),
        )
        .unwrap();
        let e = embed::embed(&pair, Side::Right, k).unwrap();
        (g, truth, pair, e)
    }

    #[test]
    fn verify_on_pure_sample() {
        let spec = sbm::pure_3cyclic(40, 0.8);
        let (g, truth, pair, e) = analyzed_sample(&spec, 17, 3);
        let report = verify_bounds(&g, &truth, &pair, &e).unwrap();
        assert_eq!(report.cyclic_size, 120);
        assert!(report.epsilon <= 1e-10, "epsilon {}", report.epsilon);
        assert!(report.epsilon_within_first_order);
        assert!(report.epsilon_within_total);
        // Pure pattern: observed degree equals in-pattern degree.
        assert_eq!(report.d, report.d_hat);
        assert_eq!(report.perturbation.first_order, 0.0);
        assert!((report.overlap_lower - 0.3021375397356768).abs() <= 1e-12);
        let measured = report.overlap_measured.unwrap();
        assert!(measured >= report.overlap_lower, "overlap {measured}");
        assert_eq!(report.overlap_ok, Some(true));
        let decay = report.decay.as_ref().unwrap();
        assert!(decay.passed);
    }

    #[test]
    fn verify_on_mixed_sample() {
        let spec = sbm::mixed_cycles();
        let (g, truth, pair, e) = analyzed_sample(&spec, 5, 3);
        let report = verify_bounds(&g, &truth, &pair, &e).unwrap();
        assert_eq!(report.cyclic_size, 120);
        assert!(
            report.epsilon > 0.05 && report.epsilon < 0.30,
            "epsilon {}",
            report.epsilon
        );
        assert!(report.epsilon_within_first_order);
        // Mean degrees near their design values.
        let mean_d: f64 = report.d.iter().sum::<usize>() as f64 / 120.0;
        let mean_dh: f64 = report.d_hat.iter().sum::<usize>() as f64 / 120.0;
        assert!((mean_d - 32.0).abs() <= 2.0, "mean in-pattern {mean_d}");
        assert!((mean_dh - 36.4).abs() <= 2.0, "mean observed {mean_dh}");
    }

    #[test]
    fn missing_ground_truth_group() {
        let spec = sbm::pure_3cyclic(10, 0.9);
        let (g, truth, pair, _) = analyzed_sample(&spec, 3, 3);
        let e5 = PlanarEmbedding {
            coords: pair.right.as_ref().unwrap().iter().map(|z| (z.re, z.im)).collect(),
            lambda: pair.lambda,
            side: Side::Right,
            k: 5,
        };
        assert_eq!(
            verify_bounds(&g, &truth, &pair, &e5).unwrap_err(),
            BoundsError::MissingGroundTruth { k: 5 }
        );
    }
}
