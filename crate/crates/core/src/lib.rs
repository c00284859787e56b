//! Instance-level cost-sensitive classification.
//!
//! Each example carries a signed cost Δ whose sign is the label and whose
//! magnitude is the price of getting it wrong. The crate derives Δ from
//! annotations ([`cost_model`]), scores predictors by Normalized Excess Cost
//! next to the error rate ([`metrics`]), trains linear models with and
//! without costs ([`learners`], [`sampling`]), and runs seeded comparisons of
//! those training methods ([`harness`]).

pub mod cost_model;
pub mod datasets;
pub mod error;
pub mod harness;
pub mod learners;
pub mod metrics;
pub mod rng;
pub mod sampling;
pub mod synthetic;

pub use cost_model::{label_of, CostedExample, Label};
pub use datasets::Dataset;
pub use error::{Error, Result};
pub use metrics::{AggregateReport, MetricReport, Predictions};
