//! Runtime prediction and cluster sizing for distributed dataflow jobs.
//!
//! The library learns job runtime behaviour from shared runtime records
//! (machine type, cluster size, job context, measured runtime) and uses the
//! learned models to answer two questions: how long will this job take at a
//! given scale-out, and which cluster configuration meets a deadline at
//! minimal cost.
//!
//! Modules, bottom up:
//!
//! * [`dataset`]: runtime records, TSV parsing/serialization, schemas,
//!   feature encoding, and context partitioning.
//! * [`models`]: the regression models (gradient boosting, optimistic
//!   scale-out decomposition, a parametric NNLS baseline) behind one
//!   fit/predict contract.
//! * [`selection`]: leave-one-out cross-validation, error statistics, and
//!   automatic model selection.
//! * [`configurator`]: error quantiles, deadline feasibility, machine-type
//!   choice, and cost-ranked cluster plans.
//! * [`validation`]: the gate deciding whether a contributed batch of runtime
//!   records improves or degrades prediction quality.
//! * [`evalharness`]: synthetic job profiles and the experiment drivers used
//!   to evaluate models under controlled conditions.

pub mod configurator;
pub mod dataset;
pub mod evalharness;
pub mod models;
pub mod rng;
pub mod selection;
pub mod validation;
