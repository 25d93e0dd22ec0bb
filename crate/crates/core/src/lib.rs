//! Minimum-dilation spanning trees over planar point sets.
//!
//! Coordinates are exact rationals. Distances are square roots and are only
//! ever compared through certified intervals, so every verdict returned by this
//! crate is proven rather than estimated.

pub mod dilation;
pub mod dyadic;
pub mod error;
pub mod formats;
pub mod gadget;
pub mod geometry;
pub mod interval;
pub mod network;
pub mod scalar;
pub mod solver;

pub use num_bigint::BigInt;

/// Exact scalar used for all input coordinates.
pub type Rational = num_rational::BigRational;

/// Exact point.
pub type ExactPoint = geometry::Point<Rational>;
/// Floating point used for fast screening and rendering.
pub type PointF64 = geometry::Point<f64>;

pub use dilation::{
    compare_to_threshold, critical_edges, pair_dilation, threshold, tree_dilation, tree_path_length, CertConfig,
    DilationEngine, DilationReport, SymbolicRatio, ThresholdCheck, ThresholdVerdict,
};
pub use dyadic::{Dyadic, Round};
pub use error::{Error, Result};
pub use geometry::{
    circle_intersection_upper, distance_interval, orientation, segments_properly_cross, squared_distance,
    CircleIntersection, Orientation, Point, Segment,
};
pub use interval::{FastInterval, Interval};
pub use network::{edge, tree_has_crossing, Edge, PointSet, Tree};
pub use scalar::{format_rational, parse_rational, Scalar};
pub use gadget::{
    auxiliary_dstar, build_gadget, decide_partition, integerize, partition_oracle, verify_gadget, Gadget, IntegerInstance,
    Layout, LemmaReport, PartitionInstance, PartitionSolution, ReductionInstance,
};
pub use solver::{
    exhaustive_mdst, mdst_exact, min_dilation_structure, uncross_four, witness_search_five, Mode, SolverOptions,
    SolverResult, WitnessFive,
};
