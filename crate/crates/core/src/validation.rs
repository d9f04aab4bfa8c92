//! Gatekeeping for shared runtime data.
//!
//! Pooling runtime records across users only works while the pool stays
//! trustworthy: a batch of mislabeled or corrupted rows can drag every
//! later prediction off course. Before a contribution is merged, it has to
//! prove itself: models trained with and without the new rows are compared
//! on a held-out slice of the *existing* data, and the contribution is
//! accepted only when it does not degrade held-out accuracy beyond a
//! configurable tolerance.

use thiserror::Error;

use crate::dataset::{DatasetError, RuntimeRecord, TrainingSet};
use crate::models::{ModelCatalog, ModelId};
use crate::rng::{derive_seed, rng_from_seed};
use crate::selection::{train_predictor, Cap, SelectionError, TrainedPredictor};

/// Default tolerance: a contribution may worsen held-out MAPE by at most
/// 10% relative before it is rejected.
pub const DEFAULT_ACCEPT_THRESHOLD: f64 = 0.10;

/// Fewest existing records needed to carve out a meaningful holdout.
pub const MIN_EXISTING_RECORDS: usize = 4;

/// Errors from contribution validation.
#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("need at least {MIN_EXISTING_RECORDS} existing records to vet a contribution, found {found}")]
    TooFewRecords { found: usize },
    #[error("contribution holds no records")]
    EmptyContribution,
    #[error("acceptance threshold must be a finite non-negative number, got {value}")]
    InvalidThreshold { value: f64 },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
}

/// The outcome of vetting one contribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionVerdict {
    pub accepted: bool,
    /// Held-out MAPE of the model trained without the contribution.
    pub baseline_mape: f64,
    /// Held-out MAPE of the model trained with it.
    pub candidate_mape: f64,
    /// The relative degradation tolerance the verdict applied.
    pub threshold: f64,
    /// Which model the candidate training selected; useful for reporting
    /// when a contribution flips the selection.
    pub affected_model: ModelId,
}

/// Vets `contribution` against `existing` data.
///
/// A deterministic quarter of the existing records (at least one) is held
/// out, seeded by `seed`. The baseline predictor trains on the remaining
/// existing records; the candidate trains on those plus the contribution.
/// Both are scored on the holdout, which the contribution never touches,
/// so poisoned rows cannot grade their own homework. The contribution is
/// accepted when
///
/// ```text
/// candidate_mape <= baseline_mape * (1 + threshold)
/// ```
pub fn validate_contribution(
    catalog: &ModelCatalog,
    candidates: &[ModelId],
    existing: &TrainingSet,
    contribution: &[RuntimeRecord],
    cap: &Cap,
    threshold: f64,
    seed: u64,
) -> Result<ContributionVerdict, ValidationError> {
    if existing.len() < MIN_EXISTING_RECORDS {
        return Err(ValidationError::TooFewRecords { found: existing.len() });
    }
    if contribution.is_empty() {
        return Err(ValidationError::EmptyContribution);
    }
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(ValidationError::InvalidThreshold { value: threshold });
    }

    let n = existing.len();
    let holdout_size = (n / 4).max(1);
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let mut holdout: Vec<usize> = rand::seq::index::sample(&mut rng, n, holdout_size).into_vec();
    holdout.sort_unstable();
    let train: Vec<usize> = (0..n).filter(|i| holdout.binary_search(i).is_err()).collect();

    let holdout_set = existing.subset(&holdout);
    let baseline_train = existing.subset(&train);
    let candidate_train = baseline_train.with_extra(contribution)?;

    // The same selection seed on both sides keeps the comparison about the
    // data, not about sampling luck in capped cross-validation.
    let selection_seed = derive_seed(seed, 1);
    let baseline = train_predictor(catalog, candidates, &baseline_train, cap, selection_seed)?;
    let candidate = train_predictor(catalog, candidates, &candidate_train, cap, selection_seed)?;

    let baseline_mape = holdout_mape(&baseline, &holdout_set);
    let candidate_mape = holdout_mape(&candidate, &holdout_set);

    Ok(ContributionVerdict {
        accepted: candidate_mape <= baseline_mape * (1.0 + threshold),
        baseline_mape,
        candidate_mape,
        threshold,
        affected_model: candidate.selected().clone(),
    })
}

fn holdout_mape(predictor: &TrainedPredictor, holdout: &TrainingSet) -> f64 {
    let total: f64 = holdout
        .records()
        .iter()
        .map(|r| {
            let predicted =
                predictor.predict_query(&r.machine_type, r.instance_count, &r.context);
            ((r.gross_runtime_ms - predicted) / r.gross_runtime_ms).abs()
        })
        .sum();
    total / holdout.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ContextFeature, CtxValue, FeatureKind, JobSchema};

    fn schema() -> JobSchema {
        JobSchema::new(
            "wordcount",
            vec![ContextFeature { name: "size_gb".into(), kind: FeatureKind::Numeric }],
        )
        .unwrap()
    }

    fn record(scale_out: u32, size_gb: f64, runtime_ms: f64) -> RuntimeRecord {
        RuntimeRecord {
            machine_type: "m5.xlarge".into(),
            instance_count: scale_out,
            context: vec![CtxValue::Num(size_gb)],
            gross_runtime_ms: runtime_ms,
        }
    }

    /// Records following runtime = 6000 * size / s + 2000, with a small
    /// deterministic wobble so no model fits the holdout perfectly and
    /// relative-degradation thresholds have a meaningful baseline.
    fn clean_records() -> Vec<RuntimeRecord> {
        let mut records = Vec::new();
        for &s in &[2u32, 4, 6, 8] {
            for &size in &[10.0, 20.0, 30.0, 40.0, 50.0, 60.0] {
                let truth = 6000.0 * size / f64::from(s) + 2000.0;
                let wobble = 1.0 + 0.02 * (records.len() as f64 * 0.7).sin();
                records.push(record(s, size, truth * wobble));
            }
        }
        records
    }

    fn existing() -> TrainingSet {
        TrainingSet::new(schema(), clean_records()).unwrap()
    }

    fn defaults() -> (ModelCatalog, Vec<ModelId>) {
        let catalog = ModelCatalog::with_defaults();
        let candidates = catalog.ids();
        (catalog, candidates)
    }

    #[test]
    fn duplicate_records_pass_the_gate() {
        let (catalog, candidates) = defaults();
        let existing = existing();
        let contribution: Vec<RuntimeRecord> = existing.records()[..6].to_vec();
        let verdict = validate_contribution(
            &catalog,
            &candidates,
            &existing,
            &contribution,
            &Cap::none(),
            DEFAULT_ACCEPT_THRESHOLD,
            7,
        )
        .unwrap();
        assert!(verdict.accepted, "verdict: {verdict:?}");
    }

    #[test]
    fn corrupted_runtimes_are_rejected() {
        let (catalog, candidates) = defaults();
        let existing = existing();
        let contribution: Vec<RuntimeRecord> = existing.records()[..8]
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.gross_runtime_ms *= 100.0;
                r
            })
            .collect();
        let verdict = validate_contribution(
            &catalog,
            &candidates,
            &existing,
            &contribution,
            &Cap::none(),
            DEFAULT_ACCEPT_THRESHOLD,
            7,
        )
        .unwrap();
        assert!(!verdict.accepted, "verdict: {verdict:?}");
        assert!(verdict.candidate_mape > verdict.baseline_mape);
    }

    #[test]
    fn threshold_only_moves_the_verdict_line() {
        let (catalog, candidates) = defaults();
        let existing = existing();
        let contribution: Vec<RuntimeRecord> = existing.records()[..8]
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.gross_runtime_ms *= 3.0;
                r
            })
            .collect();
        let run = |threshold: f64| {
            validate_contribution(
                &catalog,
                &candidates,
                &existing,
                &contribution,
                &Cap::none(),
                threshold,
                11,
            )
            .unwrap()
        };
        let strict = run(0.0);
        let loose = run(1e6);
        // The measured errors are threshold-independent.
        assert_eq!(strict.baseline_mape.to_bits(), loose.baseline_mape.to_bits());
        assert_eq!(strict.candidate_mape.to_bits(), loose.candidate_mape.to_bits());
        // Accepting at a strict threshold implies accepting at a looser one.
        assert!(loose.accepted || !strict.accepted);
        assert!(loose.accepted, "an astronomically loose threshold accepts anything");
    }

    #[test]
    fn baseline_never_sees_the_contribution() {
        let (catalog, candidates) = defaults();
        let existing = existing();
        let garbage_a = vec![record(2, 10.0, 9e9)];
        let garbage_b = vec![record(8, 60.0, 1.0), record(4, 30.0, 8e8)];
        let run = |contribution: &[RuntimeRecord]| {
            validate_contribution(
                &catalog,
                &candidates,
                &existing,
                contribution,
                &Cap::none(),
                DEFAULT_ACCEPT_THRESHOLD,
                3,
            )
            .unwrap()
        };
        let a = run(&garbage_a);
        let b = run(&garbage_b);
        assert_eq!(a.baseline_mape.to_bits(), b.baseline_mape.to_bits());
    }

    #[test]
    fn verdicts_are_deterministic_per_seed() {
        let (catalog, candidates) = defaults();
        let existing = existing();
        let contribution: Vec<RuntimeRecord> = existing.records()[..4].to_vec();
        let run = |seed: u64| {
            validate_contribution(
                &catalog,
                &candidates,
                &existing,
                &contribution,
                &Cap::splits(8),
                DEFAULT_ACCEPT_THRESHOLD,
                seed,
            )
            .unwrap()
        };
        let first = run(42);
        let second = run(42);
        assert_eq!(first, second);
    }

    #[test]
    fn small_pools_and_empty_contributions_are_refused() {
        let (catalog, candidates) = defaults();
        let tiny = TrainingSet::new(schema(), clean_records()[..3].to_vec()).unwrap();
        let contribution = vec![record(2, 10.0, 32_000.0)];
        assert!(matches!(
            validate_contribution(
                &catalog,
                &candidates,
                &tiny,
                &contribution,
                &Cap::none(),
                0.1,
                0
            ),
            Err(ValidationError::TooFewRecords { found: 3 })
        ));
        assert!(matches!(
            validate_contribution(
                &catalog,
                &candidates,
                &existing(),
                &[],
                &Cap::none(),
                0.1,
                0
            ),
            Err(ValidationError::EmptyContribution)
        ));
    }

    #[test]
    fn schema_mismatches_surface_as_dataset_errors() {
        let (catalog, candidates) = defaults();
        let bad = vec![RuntimeRecord {
            machine_type: "m5.xlarge".into(),
            instance_count: 2,
            context: vec![CtxValue::Num(10.0), CtxValue::Num(3.0)],
            gross_runtime_ms: 1000.0,
        }];
        assert!(matches!(
            validate_contribution(
                &catalog,
                &candidates,
                &existing(),
                &bad,
                &Cap::none(),
                0.1,
                0
            ),
            Err(ValidationError::Dataset(_))
        ));
    }
}
