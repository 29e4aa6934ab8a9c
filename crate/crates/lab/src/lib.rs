//! Monte Carlo layer on top of `fpp-core`.
//!
//! [`estimator`] turns replicated passage times into estimates of the mean,
//! variance and time constant. [`bench`] instantiates the events and sets
//! used in the lower-bound argument for the non-random fluctuation and checks
//! them at finite `n`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod bench;
pub mod campaign;
pub mod error;
pub mod estimator;

pub use campaign::{Padding, Setup, Stream, Tally};
pub use error::{LabError, Result};
pub use estimator::{
    estimate_t, fluctuation_lower_bound, g_hat, parse_fluctuation_csv, FluctuationReport,
    FluctuationRow, TEstimate,
};
