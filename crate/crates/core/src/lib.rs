//! Metric graphs and entropy-maximal floodings.
//!
//! A *flooding* is a piecewise-linearly growing closed subset of a metric
//! graph: it starts from a finite set of source points and absorbs boundary
//! length at aggregate rate one until the whole graph is covered. Each
//! flooding carries an entropy functional `beta`; floodings maximizing it
//! describe the limit shape of uniform random labelings conditioned on a
//! fixed number of peaks (local maxima).
//!
//! The crate provides:
//! - [`graph`]: metric graphs, points on them, distances, subdivisions,
//!   and components after removing cut points;
//! - [`flooding`]: event-driven simulation of floodings, covered-set
//!   queries, Hausdorff/flooding distance, structural diagnostics;
//! - [`entropy`]: the entropy functional `beta` and its restrictions;
//! - [`tree`]: centroids, proportional rate policies, the closed-form
//!   entropy maximum on trees, and the multi-source partition optimizer;
//! - [`labeling`]: random and exhaustive labelings, peak detection,
//!   conditioned sampling, empirical floodings, multinomial counting;
//! - [`experiments`]: scripted reproductions of the known optima with
//!   pass/fail reports and plot-ready CSV.

pub mod entropy;
pub mod experiments;
pub mod flooding;
pub mod graph;
pub mod labeling;
pub mod tree;

pub use entropy::{beta, beta_restricted, BetaReport};
pub use flooding::{
    flooding_distance, flooding_distance_with_resolution, hausdorff_distance, simulate,
    structure_checks, CoveredSet, Flooding, RandomSimplexPolicy, RatePolicy, StageCtx,
    UniformPolicy,
};
pub use graph::{CombGraph, Component, GraphPoint, MetricGraph, SubdivisionGraph};
pub use tree::{
    beta_star_single, centroid, discrete_centroids, optimal_flooding, verify_optimality_properties,
    OptimalFlooding, PartitionPlan, ProportionalPolicy,
};

/// Absolute tolerance for length and time comparisons throughout the crate.
///
/// Edge lengths are short decimals at desk scale; 1e-9 is far below any
/// meaningful geometric feature and far above accumulated f64 rounding.
pub const TOL: f64 = 1e-9;
