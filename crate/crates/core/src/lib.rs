//! Optimal binary codes and projective measurements for classical
//! communication over a single qubit channel.
//!
//! Channels are handled in their affine coherence-vector form `v ↦ T v + b`.
//! The crate computes the region of achievable binary transition
//! probabilities, the maximal probability of correct decision for a given
//! prior, and the binary capacity with its optimal input states, measurement
//! and prior. Binary classical channels can be compared by dominance,
//! stochastic degradedness and capability.

pub mod bloch;
pub mod capacity;
pub mod channel;
pub mod detection;
pub mod error;
pub mod linalg;
pub mod ordering;
pub mod region;
pub mod sampling;
pub mod secular;

pub use bloch::{
    measurement_pair_from_axis, transition_probabilities, CoherenceVector, ProjectorPair,
    QubitState, TransitionPoint, UnitAxis,
};
pub use capacity::{
    binary_entropy, mutual_information, optimal_prior, optimize_capacity, CapacityReport,
    PriorSolution,
};
pub use channel::{AffineChannel, ChoiReport, DiagonalFrame, FarthestPoint, SupportPoint};
pub use detection::{optimize_pc, pc_of_point, DetectionMode, DetectionReport};
pub use error::{Error, Result};
pub use ordering::{
    compare, dominates, less_capable, stochastically_degraded, Degradation, OrderReport,
    TransitionMatrix,
};
pub use region::{
    edge_problem, generate_region, region_contains, EllipseProblem, Region, RegionSample,
};
