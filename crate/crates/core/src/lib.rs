//! Monte-Carlo simulation of user scheduling and passive beamforming for an
//! IRS-aided FDMA/OFDMA multi-user downlink.
//!
//! A drop places users in a cell-centre and a cell-edge area, draws
//! shadowing and small-scale fading, and evaluates nine access schemes on
//! that single realization: TDMA, NOMA and FDMA without IRS, TDMA with
//! per-slot IRS optimization, and FDMA with one common IRS configuration
//! chosen randomly or tuned for a scheduled user (nearest, farthest,
//! exhaustive best, or random). Sum spectral efficiencies are collected into
//! empirical CDFs.

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod channel;
pub mod config;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod multiaccess;
pub mod numerics;

pub use config::{parse_config, SystemConfig};
pub use error::{Error, Result};
pub use montecarlo::{emit_report, run_trials, run_trials_with, CdfReport, Execution};
pub use multiaccess::SchemeId;
