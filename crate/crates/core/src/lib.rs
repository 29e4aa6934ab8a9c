//! Euclidean first-passage percolation on Poisson point clouds.
//!
//! The crate is organised bottom-up:
//!
//! * [`region`] and [`seed`] hold the small geometric and seeding helpers,
//! * [`point_process`] draws, extends and partially resamples homogeneous
//!   Poisson samples in axis-aligned boxes,
//! * [`grid`] indexes a sample for nearest-point and ball queries,
//! * [`geodesic`] computes passage times `T(x, y)` for the edge weight
//!   `|a - b|^alpha` together with the optimal path and a certificate,
//! * [`stats`] and [`ks`] are the statistical primitives used by the
//!   Monte Carlo layers built on top of this crate.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod error;
pub mod geodesic;
pub mod grid;
pub mod io;
pub mod ks;
pub mod point_process;
pub mod region;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
pub use geodesic::{
    audit_local_optimality, ball_crossing, brute_force_passage_time, edge_cost, geodesic_via,
    max_jump, passage_time, passage_time_via, passage_times_from, via_legs, AlphaParam,
    GeodesicOptions, GeodesicResult, Violation,
};
pub use grid::{build_index, SpatialGrid};
pub use point_process::{plant_event_e, resample_region, sample_poisson, PoissonSample};
pub use region::BoxRegion;
pub use stats::StreamStats;
