//! Detection of k-cyclic community structure in directed graphs.
//!
//! A strongly connected directed graph whose vertices split into k groups
//! feeding each other in a ring has transition-matrix eigenvalues near the
//! k-th roots of unity. This crate locates those eigenpairs, embeds the
//! vertices in the plane using the real and imaginary parts of an
//! eigenvector, and recovers the groups by angular sector or by density
//! clustering. It also ships stochastic block model generators for cyclic
//! benchmarks, perturbation bounds that certify how far an eigenvalue can
//! drift, and an SVD baseline that illustrates why singular values alone
//! cannot see cycle structure.

pub mod bounds;
pub mod embed;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod report;
pub mod sbm;
pub mod spectral;
pub mod svd;

pub use graph::{Digraph, GraphError, TransitionMatrix};
