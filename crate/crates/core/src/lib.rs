//! Dynamic oversampling for uplink large-scale MIMO receivers with 1-bit
//! ADCs.
//!
//! The crate builds the oversampled system model, computes the statistics
//! of the sign-quantized signal, designs dimension-reduction (sample
//! selection or combining) matrices, detects symbols with a sliding-window
//! LRA-MMSE filter and evaluates sum rate, error rates, operation counts
//! and receiver power.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod detection;
pub mod error;
pub mod flops;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod quantization;
pub mod reduction;
pub mod signal_model;

pub use config::{Modulation, SystemConfig};
pub use error::{Error, Result};
pub use quantization::QuantizedStatistics;
pub use reduction::{Algorithm, RatioTraceProblem, ReductionMatrix};
pub use signal_model::OversampledModel;
