//! Synthetic workloads and repeatable experiments.
//!
//! Everything here exists to answer two questions about the prediction
//! stack without access to a real cluster:
//!
//! * does training on globally pooled runtime data beat training on the
//!   records of a single job context ([`experiment_origin`]), and
//! * how does accuracy move as the number of available records grows
//!   ([`experiment_availability`])?
//!
//! [`JobProfile`] describes five synthetic dataflow jobs with known
//! ground-truth runtime behavior; `generate` draws noisy training sets
//! from them. Experiments run entirely from seeds, so a report can be
//! reproduced byte for byte.

mod experiments;
mod synth;

pub use experiments::{
    experiment_availability, experiment_origin, AvailabilityConfig, ExperimentReport,
    OriginConfig, ReportRow, Scenario, PREDICTOR_LABEL,
};
pub use synth::{JobKind, JobProfile};

use thiserror::Error;

use crate::dataset::DatasetError;
use crate::selection::SelectionError;

/// Errors from dataset synthesis and experiment execution.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot generate an empty dataset")]
    EmptyGeneration,
    #[error("noise level must be a finite non-negative fraction, got {value}")]
    InvalidNoise { value: f64 },
    #[error("no job context partition holds at least {min} records; generate more data")]
    NoEligiblePartition { min: usize },
    #[error("invalid experiment configuration: {reason}")]
    InvalidConfig { reason: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
}
