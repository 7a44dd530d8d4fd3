//! Coupled LDPC code ensembles over the binary erasure channel.
//!
//! The crate builds position-level descriptions of spatially-coupled,
//! circular, loop, and overlapped-circular LDPC ensembles, analyzes them
//! with density evolution (BP thresholds, iteration counts, splitting
//! behavior), constructs matching protograph base matrices with optional
//! precoding, lifts them to parity-check matrices, and validates the
//! constructions with finite-length peeling and BP erasure decoding
//! experiments.
//!
//! Analysis routines are generic over the floating-point scalar through
//! [`Real`]; the [`Scalar`] alias fixes the default used by the CLI and the
//! published tables.

pub mod alist;
pub mod density_evolution;
pub mod ensembles;
pub mod finite_length;
pub mod protograph;
pub mod scalar;

pub use density_evolution::{
    bp_threshold, de_step, evolve, evolve_traced, regular_bp_threshold, required_iterations,
    splitting_necessary_condition, splitting_occurs, theorem1_bounds_check, DeOutcome, DeSettings,
    DeSystem, ThresholdResult,
};
pub use ensembles::{
    connectivity_circular, connectivity_loop, connectivity_oc, connectivity_sc, degree_profile,
    design_rate, ConnectivityMatrix, DegreeLaw, DegreeProfile, EnsembleSpec, Family,
};
pub use finite_length::{
    bp_erasure_decode, fer_experiment, graph_evolution, graph_evolution_union, peel,
    sample_erasures, sample_tanner_graph, sample_tanner_graph_with_model, EvolutionCurves,
    FerPoint, PeelingTrace, SamplingModel, TannerGraph,
};
pub use protograph::{
    base_circular, base_oc, base_ocp, base_sc, lift, protograph_bp_threshold, protograph_de,
    punctured_stopping_set_exists, BaseMatrix, EdgeSpreading, ParityCheck, PrecodeBlock,
};
pub use scalar::Real;

/// Default scalar for thresholds, rates, and erasure probabilities.
pub type Scalar = f64;

/// Density evolution outcome at the default scalar.
pub type DeOutcomeF64 = density_evolution::DeOutcome<Scalar>;

/// Threshold search result at the default scalar.
pub type ThresholdResultF64 = density_evolution::ThresholdResult<Scalar>;
