//! Computable uniform geometry on finite metric spaces.
//!
//! * [`metric`]: validated finite metric spaces, distance to a set, balls,
//!   diameters, ball-inclusion maps between two metrics.
//! * [`chain`]: ε-threshold graphs, chain components, chain-balls `B^m`,
//!   hop distances, the chain metric `d_ε` and irreducible chains.
//! * [`builders`]: component labelings and the label-padded chain metric
//!   [`RhoMetric`], plus local-identity and Lipschitz-in-the-small checks.
//! * [`bornology`]: net, chain and component covers, scale profiles and
//!   bornology reports.
//! * [`spaces`]: example-space generators, CSV ingestion, JSON reports.
//! * [`verify`]: seeded random instances and the property suites.
//! * [`cli`]: the `chainmetric` command line.

pub mod bornology;
pub mod builders;
pub mod chain;
pub mod cli;
pub mod error;
pub mod metric;
pub mod spaces;
mod union_find;
pub mod verify;

pub use bornology::{
    bornology_report, bourbaki_cauchy_prefix, chain_cover, components_met, cover_with_graph,
    net_cover, oscillation_check, oscillation_profile, rho_bounded_forward_bound,
    rho_bounded_reverse_cover, scale_profile, BornologyReport, CoverMethod, CoverResult,
    ScaleProfile,
};
pub use builders::{
    check_lipschitz_small, check_locally_identical, ComponentLabeling, LsWitness, PairDistance,
    RhoMetric,
};
pub use chain::{reduce_chain, Chain, ChainBall, ChainGraph, Depth};
pub use error::{Error, Result};
pub use metric::{
    ball_inclusion_map, closed_ball, diameter, dist_to_set, validate_metric, FiniteMetricSpace,
    MetricValidationReport, Norm, SubsetHandle, TOLERANCE,
};
pub use spaces::{generate, GeneratedSpace, SpaceSpec};
