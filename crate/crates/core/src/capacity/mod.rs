//! Secrecy capacities of the type I and type II wiretap channels.

mod ba;
mod curve;
mod erasure;
mod optimizer;

pub use ba::{ba_capacity, ba_capacity_rows, BaResult, BA_MAX_ITERATIONS, BA_TOLERANCE};
pub use curve::{capacity_curve, uniform_grid, CapacityCurve, CurvePoint, CONVEXITY_TOLERANCE};
pub use erasure::{erasure_channel, erasure_reduction_check, ErasureCheck, ERASURE_IDENTITY_TOLERANCE};
pub use optimizer::{
    cardinality_comparison, wtc1_ss_capacity, wtc1_ss_capacity_with, wtc2_ss_capacity,
    wtc2_ss_capacity_with, CapacityMethod, CapacityResult, CardinalityComparison,
    OptimizerConfig, RestartTrace, Scratch, SecrecyObjective,
};
