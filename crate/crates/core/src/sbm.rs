//! Non-symmetric stochastic block models and the benchmark generators
//! used throughout the crate.
//!
//! A model is a list of block sizes plus a dense block-to-block edge
//! probability matrix. Sampling performs an independent Bernoulli trial
//! for every ordered vertex pair (i, j), i != j. The generator is pinned:
//! ChaCha8 keyed by the seed, one independent stream per source vertex,
//! and exactly one uniform draw per ordered pair in row-major order (the
//! diagonal draw happens too, then gets discarded). Pinning the draw
//! schedule keeps samples reproducible across releases and lets models
//! sharing a block prefix produce identical edges among those vertices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Digraph;

#[derive(Debug, Error, PartialEq)]
pub enum SbmError {
    #[error("block {0} has size zero")]
    EmptyBlock(usize),
    #[error("p0 has {got} entries, expected {want} for {blocks} blocks")]
    ShapeMismatch { got: usize, want: usize, blocks: usize },
    #[error("probability {value} out of range at block pair ({row}, {col})")]
    ProbabilityOutOfRange { row: usize, col: usize, value: f64 },
    #[error("noise probability {0} out of range")]
    NoiseOutOfRange(f64),
    #[error("cyclic group references block {0} which does not exist")]
    InvalidCyclicBlock(usize),
    #[error("cyclic group lists block {0} more than once")]
    RepeatedCyclicBlock(usize),
    #[error("cyclic group declares length {k} but has {classes} position classes")]
    CyclicLengthMismatch { k: usize, classes: usize },
}

/// One cyclic flow among blocks: position class c feeds position class
/// (c + 1) mod k. A position class may contain several blocks when the
/// cyclic structure overlaps other communities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicGroup {
    pub k: usize,
    /// `classes[c]` lists the block ids occupying cycle position c.
    pub classes: Vec<Vec<usize>>,
}

/// Block model specification: sizes, dense block-to-block probabilities,
/// and the cyclic structure planted in them.
///
/// `p0` is row-major with `p0[r * b + c]` the probability of an edge from
/// a block-r vertex to a block-c vertex. The builders fold the background
/// `noise` into every entry they leave unstructured; `noise` is kept as a
/// field so serialized specs stay self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockModelSpec {
    pub block_sizes: Vec<usize>,
    pub p0: Vec<f64>,
    pub noise: f64,
    #[serde(default)]
    pub cyclic_groups: Vec<CyclicGroup>,
}

/// Per-vertex labels recorded at sampling time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Block id of each vertex.
    pub membership: Vec<usize>,
    pub cyclic_groups: Vec<CyclicGroup>,
}

impl GroundTruth {
    /// Vertices of each position class of cyclic group `g`, ascending.
    pub fn cycle_classes(&self, g: usize) -> Vec<Vec<usize>> {
        let group = &self.cyclic_groups[g];
        group
            .classes
            .iter()
            .map(|blocks| {
                (0..self.membership.len())
                    .filter(|&v| blocks.contains(&self.membership[v]))
                    .collect()
            })
            .collect()
    }
}

impl BlockModelSpec {
    pub fn block_count(&self) -> usize {
        self.block_sizes.len()
    }

    /// Total vertex count.
    pub fn n(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Block id per vertex, blocks laid out consecutively.
    pub fn membership(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n());
        for (b, &size) in self.block_sizes.iter().enumerate() {
            out.extend(std::iter::repeat(b).take(size));
        }
        out
    }

    pub fn probability(&self, from_block: usize, to_block: usize) -> f64 {
        self.p0[from_block * self.block_count() + to_block]
    }

    pub fn validate(&self) -> Result<(), SbmError> {
        let b = self.block_count();
        if let Some(ix) = self.block_sizes.iter().position(|&s| s == 0) {
            return Err(SbmError::EmptyBlock(ix));
        }
        if self.p0.len() != b * b {
            return Err(SbmError::ShapeMismatch {
                got: self.p0.len(),
                want: b * b,
                blocks: b,
            });
        }
        for (ix, &p) in self.p0.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(SbmError::ProbabilityOutOfRange {
                    row: ix / b,
                    col: ix % b,
                    value: p,
                });
            }
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(SbmError::NoiseOutOfRange(self.noise));
        }
        for group in &self.cyclic_groups {
            if group.classes.len() != group.k {
                return Err(SbmError::CyclicLengthMismatch {
                    k: group.k,
                    classes: group.classes.len(),
                });
            }
            let mut seen = vec![false; b];
            for &block in group.classes.iter().flatten() {
                if block >= b {
                    return Err(SbmError::InvalidCyclicBlock(block));
                }
                if seen[block] {
                    return Err(SbmError::RepeatedCyclicBlock(block));
                }
                seen[block] = true;
            }
        }
        Ok(())
    }

    /// Draws one graph. Deterministic in (self, seed).
    pub fn sample(&self, seed: u64) -> Result<(Digraph, GroundTruth), SbmError> {
        self.validate()?;
        let n = self.n();
        let b = self.block_count();
        let membership = self.membership();
        let mut edges = Vec::new();
        for i in 0..n {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let row = &self.p0[membership[i] * b..(membership[i] + 1) * b];
            for (j, &bj) in membership.iter().enumerate() {
                let u: f64 = rng.random();
                if i != j && u < row[bj] {
                    edges.push((i, j));
                }
            }
        }
        let graph = Digraph::from_edge_list(&edges, Some(n)).expect("sampled edges are in range");
        Ok((
            graph,
            GroundTruth {
                membership,
                cyclic_groups: self.cyclic_groups.clone(),
            },
        ))
    }
}

fn spec_from_pattern(
    block_sizes: Vec<usize>,
    noise: f64,
    structured: &[(usize, usize, f64)],
    cyclic_groups: Vec<CyclicGroup>,
) -> BlockModelSpec {
    let b = block_sizes.len();
    let mut p0 = vec![noise; b * b];
    for &(r, c, p) in structured {
        p0[r * b + c] = p;
    }
    BlockModelSpec {
        block_sizes,
        p0,
        noise,
        cyclic_groups,
    }
}

/// Three blocks of equal size feeding each other in a ring with edge
/// probability `rho` and nothing else.
pub fn pure_3cyclic(group_size: usize, rho: f64) -> BlockModelSpec {
    spec_from_pattern(
        vec![group_size; 3],
        0.0,
        &[(0, 1, rho), (1, 2, rho), (2, 0, rho)],
        vec![CyclicGroup {
            k: 3,
            classes: vec![vec![0], vec![1], vec![2]],
        }],
    )
}

/// A 3-cyclic flow hidden among classical communities.
///
/// The cyclic flow visits three position groups of 150, 100 and 150
/// vertices: position 0 is a pure block of 100 plus a 50-vertex overlap
/// with the magenta community, position 2 likewise overlaps the yellow
/// community, position 1 is a pure block of 100. Magenta and yellow are
/// 150-vertex classical communities (overlap 50 + remainder 100) with
/// internal probability 0.2; `q_ext` further classical communities of 150
/// vertices have internal probability 0.4; the cyclic flow runs at 0.5 and
/// background noise at 0.001.
pub fn hidden_3cyclic(q_ext: usize) -> BlockModelSpec {
    // Blocks: 0,1,2 pure cyclic positions (100 each); 3 = magenta overlap
    // (50, also cyclic position 0); 4 = yellow overlap (50, also cyclic
    // position 2); 5 = magenta remainder (100); 6 = yellow remainder (100);
    // then q_ext external blocks of 150. External blocks come last so two
    // specs differing only in q_ext share a vertex prefix.
    let mut sizes = vec![100, 100, 100, 50, 50, 100, 100];
    sizes.extend(std::iter::repeat(150).take(q_ext));

    let mut structured = Vec::new();
    let pos: [&[usize]; 3] = [&[0, 3], &[1], &[2, 4]];
    for c in 0..3 {
        for &from in pos[c] {
            for &to in pos[(c + 1) % 3] {
                structured.push((from, to, 0.5));
            }
        }
    }
    for community in [[3usize, 5], [4, 6]] {
        for &from in &community {
            for &to in &community {
                structured.push((from, to, 0.2));
            }
        }
    }
    for e in 0..q_ext {
        structured.push((7 + e, 7 + e, 0.4));
    }

    spec_from_pattern(
        sizes,
        0.001,
        &structured,
        vec![CyclicGroup {
            k: 3,
            classes: vec![vec![0, 3], vec![1], vec![2, 4]],
        }],
    )
}

/// Ten blocks mixing one classical community with planted 2-, 3- and
/// 4-cycles, dense pattern 0.80 against background 0.01.
pub fn mixed_cycles() -> BlockModelSpec {
    let rho_in = 0.80;
    let structured = [
        (0, 0, rho_in),
        (1, 2, rho_in),
        (2, 1, rho_in),
        (3, 4, rho_in),
        (4, 5, rho_in),
        (5, 3, rho_in),
        (6, 7, rho_in),
        (7, 8, rho_in),
        (8, 9, rho_in),
        (9, 6, rho_in),
    ];
    spec_from_pattern(
        vec![120, 60, 60, 40, 40, 40, 30, 30, 30, 30],
        0.01,
        &structured,
        vec![
            CyclicGroup {
                k: 2,
                classes: vec![vec![1], vec![2]],
            },
            CyclicGroup {
                k: 3,
                classes: vec![vec![3], vec![4], vec![5]],
            },
            CyclicGroup {
                k: 4,
                classes: vec![vec![6], vec![7], vec![8], vec![9]],
            },
        ],
    )
}
