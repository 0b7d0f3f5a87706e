//! Eigenvalue clusters of the lattice Laplacian and chains of nearby eigenvalues.
//!
//! Points `j` are compared through `Φ(j) = (j, μ_j)` with the sup-norm on the
//! difference. A *Γ-chain* is a path of distinct points with consecutive
//! `Φ`-distance at most `Γ`; the *clustering relation* links `j`, `j'` when
//! that distance is at most `(|j| + |j'|)^δ`, and its components on a finite
//! box form a [`ClusterPartition`].

mod chain;
mod partition;
mod union_find;
mod verify;

pub use chain::{
    chain_exponent, chain_scaling_experiment, gamma_link_graph, is_gamma_link, max_chain_length, phi,
    search_max_chain, ChainSearch, GammaChain, PhiPoint, ScalingRow, ScalingTable,
};
pub use partition::{
    boundary_margin, build_partition, build_partition_with, delta_threshold, is_cluster_link, Cluster,
    ClusterPartition, DeltaPolicy,
};
pub use union_find::UnionFind;
pub use verify::{
    exceeds_power, verify_cluster_properties, ConstantOverrides, DyadicViolation, PairViolation,
    VerificationReport,
};
