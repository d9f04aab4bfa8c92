//! Cross-validation, error statistics, and automatic model choice.
//!
//! Which model predicts a given job best depends on the data at hand, so
//! the library measures instead of guessing: every candidate model runs
//! through leave-one-out cross-validation on the training set, and the one
//! with the lowest mean absolute percentage error wins. The winner's
//! signed-error distribution (`actual - predicted`) feeds the deadline
//! margin in the configurator.
//!
//! Leave-one-out cost grows with the square of the set size, so a [`Cap`]
//! can bound the work, either by a deterministic seeded subsample of splits
//! or by a wall-clock budget. Split-capped runs are bit-reproducible for a
//! fixed seed; time-capped runs depend on machine speed by design.

use std::time::Instant;

use rand::seq::index::sample;
use thiserror::Error;

use crate::dataset::{CtxValue, Encoder, TrainingSet};
use crate::models::{ConstantModel, FittedModel, ModelCatalog, ModelId, MIN_PREDICTION_MS};
use crate::rng::rng_from_seed;

/// Model id used when the selected model cannot be fitted on the full set
/// and the predictor degrades to the training mean.
pub const FALLBACK_MODEL_NAME: &str = "fallback-mean";

/// Bounds on cross-validation work.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cap {
    /// Evaluate at most this many splits, chosen by a seeded subsample.
    pub max_splits: Option<usize>,
    /// Stop starting new splits once this much wall time has passed.
    pub time_budget_ms: Option<u64>,
}

impl Cap {
    pub fn none() -> Cap {
        Cap::default()
    }

    pub fn splits(max_splits: usize) -> Cap {
        Cap {
            max_splits: Some(max_splits),
            time_budget_ms: None,
        }
    }
}

/// The outcome of cross-validating one model.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub model_id: ModelId,
    /// `actual - predicted` per evaluated split, in ascending record order.
    pub signed_errors: Vec<f64>,
    /// Mean absolute percentage error over the evaluated splits.
    pub mape: f64,
    /// Mean signed error.
    pub mu: f64,
    /// Population standard deviation of the signed errors.
    pub sigma: f64,
    pub n_splits: usize,
    /// Seed that drove split subsampling; recorded for reproducibility.
    pub seed: u64,
}

impl CvReport {
    pub const TSV_HEADER: &'static str = "model_id\tn_splits\tmu_ms\tsigma_ms\tmape";

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}",
            self.model_id, self.n_splits, self.mu, self.sigma, self.mape
        )
    }

    pub fn to_tsv_block(&self) -> String {
        format!("{}\n{}\n", Self::TSV_HEADER, self.tsv_row())
    }
}

/// Errors from cross-validation and selection.
#[derive(Debug, Error)]
pub enum SelectionError {
    #[error("cross-validation needs at least 2 records, found {found}")]
    TooFewRecords { found: usize },
    #[error("error quantiles need at least 2 evaluated splits, found {found}")]
    TooFewSplits { found: usize },
    #[error("no factory registered for model id {id}")]
    UnknownModel { id: ModelId },
    #[error("candidate list is empty")]
    NoCandidates,
}

/// Runs leave-one-out cross-validation for one model.
///
/// Each split holds out one record, trains on the rest (encoding included:
/// the encoder is refitted per split so the held-out record never leaks
/// category levels), and predicts the held-out runtime. Splits where the
/// model cannot be fitted fall back to the training-mean prediction rather
/// than failing the whole run.
///
/// With `cap.max_splits < n`, the evaluated record indices are a seeded
/// subsample; errors are always reported in ascending record order.
pub fn cross_validate(
    catalog: &ModelCatalog,
    model_id: &ModelId,
    ts: &TrainingSet,
    cap: &Cap,
    seed: u64,
) -> Result<CvReport, SelectionError> {
    let n = ts.len();
    if n < 2 {
        return Err(SelectionError::TooFewRecords { found: n });
    }
    let factory = catalog
        .get(model_id)
        .ok_or_else(|| SelectionError::UnknownModel { id: model_id.clone() })?;

    let held_out = chosen_splits(n, cap, seed);
    let started = Instant::now();

    let mut signed_errors = Vec::with_capacity(held_out.len());
    let mut ape_sum = 0.0;
    for (done, &i) in held_out.iter().enumerate() {
        if done > 0 {
            if let Some(budget) = cap.time_budget_ms {
                if started.elapsed().as_millis() as u64 >= budget {
                    break;
                }
            }
        }
        let train = ts.without(i);
        let encoder = Encoder::fit(&train);
        let (x, y) = encoder.encode_set(&train);
        let prediction = match factory.fit(&x, &y) {
            Ok(model) => model
                .predict(&encoder.encode_record(&ts.records()[i]))
                .unwrap_or(MIN_PREDICTION_MS),
            Err(_) => (y.iter().sum::<f64>() / y.len() as f64).max(MIN_PREDICTION_MS),
        };
        let actual = ts.records()[i].gross_runtime_ms;
        signed_errors.push(actual - prediction);
        ape_sum += (actual - prediction).abs() / actual;
    }

    let k = signed_errors.len();
    let mu = signed_errors.iter().sum::<f64>() / k as f64;
    let variance = signed_errors.iter().map(|e| (e - mu) * (e - mu)).sum::<f64>() / k as f64;
    Ok(CvReport {
        model_id: model_id.clone(),
        mape: ape_sum / k as f64,
        mu,
        sigma: variance.sqrt(),
        n_splits: k,
        seed,
        signed_errors,
    })
}

/// The record indices to hold out, ascending.
fn chosen_splits(n: usize, cap: &Cap, seed: u64) -> Vec<usize> {
    match cap.max_splits {
        Some(m) if m < n => {
            let mut rng = rng_from_seed(seed);
            let mut picked = sample(&mut rng, n, m.max(1)).into_vec();
            picked.sort_unstable();
            picked
        }
        _ => (0..n).collect(),
    }
}

/// Cross-validates every candidate and returns the winner.
///
/// The winner has the lowest mean absolute percentage error; ties go to the
/// earlier candidate. All candidates see the same seed and therefore the
/// same subsampled splits.
pub fn select_model(
    catalog: &ModelCatalog,
    candidates: &[ModelId],
    ts: &TrainingSet,
    cap: &Cap,
    seed: u64,
) -> Result<(ModelId, CvReport), SelectionError> {
    if candidates.is_empty() {
        return Err(SelectionError::NoCandidates);
    }
    let mut best: Option<(ModelId, CvReport)> = None;
    for id in candidates {
        let report = cross_validate(catalog, id, ts, cap, seed)?;
        let better = match &best {
            None => true,
            Some((_, current)) => report.mape < current.mape,
        };
        if better {
            best = Some((id.clone(), report));
        }
    }
    Ok(best.expect("candidates is non-empty"))
}

/// The `(mu, sigma)` pair feeding the deadline margin.
///
/// Requires at least two evaluated splits; a single error has no spread to
/// estimate.
pub fn error_quantile_inputs(report: &CvReport) -> Result<(f64, f64), SelectionError> {
    if report.n_splits < 2 {
        return Err(SelectionError::TooFewSplits { found: report.n_splits });
    }
    Ok((report.mu, report.sigma))
}

/// A ready-to-use predictor: the selected model fitted on the full set.
pub struct TrainedPredictor {
    selected: ModelId,
    model: FittedModel,
    encoder: Encoder,
    report: CvReport,
}

impl TrainedPredictor {
    /// The id the selection chose (the fitted model may differ only when
    /// the full-set fit failed and the mean fallback took over).
    pub fn selected(&self) -> &ModelId {
        &self.selected
    }

    pub fn model(&self) -> &FittedModel {
        &self.model
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn report(&self) -> &CvReport {
        &self.report
    }

    /// Predicts the runtime for a query point, in milliseconds.
    pub fn predict_query(&self, machine_type: &str, instance_count: u32, context: &[CtxValue]) -> f64 {
        let row = self.encoder.encode_query(machine_type, instance_count, context);
        self.model
            .predict(&row)
            .expect("row encoded with the predictor's own encoder")
    }
}

/// Selects a model by cross-validation and fits it on the full set.
///
/// If the winning model cannot be fitted on the full set (its degradation
/// happened in every split too), the predictor degrades to the training
/// mean under the id [`FALLBACK_MODEL_NAME`].
pub fn train_predictor(
    catalog: &ModelCatalog,
    candidates: &[ModelId],
    ts: &TrainingSet,
    cap: &Cap,
    seed: u64,
) -> Result<TrainedPredictor, SelectionError> {
    let (selected, report) = select_model(catalog, candidates, ts, cap, seed)?;
    let encoder = Encoder::fit(ts);
    let (x, y) = encoder.encode_set(ts);
    let factory = catalog
        .get(&selected)
        .ok_or_else(|| SelectionError::UnknownModel { id: selected.clone() })?;
    let model = match factory.fit(&x, &y) {
        Ok(model) => model,
        Err(_) => {
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            FittedModel::from_parts(
                ModelId::Custom(FALLBACK_MODEL_NAME.to_string()),
                x.fingerprint(),
                Box::new(ConstantModel { value: mean }),
            )
        }
    };
    Ok(TrainedPredictor {
        selected,
        model,
        encoder,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ContextFeature, FeatureKind, JobSchema, RuntimeRecord};
    use crate::models::{ModelError, ModelFactory};
    use approx::assert_relative_eq;

    fn sort_like_set(runtimes: &[f64]) -> TrainingSet {
        let schema = JobSchema::new(
            "sort",
            vec![ContextFeature { name: "data_size_gb".into(), kind: FeatureKind::Numeric }],
        )
        .unwrap();
        let records = runtimes
            .iter()
            .enumerate()
            .map(|(i, &rt)| RuntimeRecord {
                machine_type: "m5.xlarge".into(),
                instance_count: 1 + (i as u32 % 4),
                context: vec![CtxValue::Num(10.0 + i as f64)],
                gross_runtime_ms: rt,
            })
            .collect();
        TrainingSet::new(schema, records).unwrap()
    }

    struct FixedFactory {
        value: f64,
    }

    impl ModelFactory for FixedFactory {
        fn id(&self) -> ModelId {
            ModelId::Custom("fixed".into())
        }
        fn fit(
            &self,
            x: &crate::dataset::FeatureMatrix,
            _y: &[f64],
        ) -> Result<FittedModel, ModelError> {
            Ok(FittedModel::from_parts(
                self.id(),
                x.fingerprint(),
                Box::new(ConstantModel { value: self.value }),
            ))
        }
    }

    struct FailingFactory;

    impl ModelFactory for FailingFactory {
        fn id(&self) -> ModelId {
            ModelId::Custom("broken".into())
        }
        fn fit(
            &self,
            _x: &crate::dataset::FeatureMatrix,
            _y: &[f64],
        ) -> Result<FittedModel, ModelError> {
            Err(ModelError::InsufficientScaleOutVariation)
        }
    }

    #[test]
    fn loo_holds_out_each_record_exactly_once() {
        let ts = sort_like_set(&[11.0, 12.0, 13.0, 14.0, 15.0]);
        let mut catalog = ModelCatalog::empty();
        catalog.register(Box::new(FixedFactory { value: 10.0 })).unwrap();
        let report = cross_validate(
            &catalog,
            &ModelId::Custom("fixed".into()),
            &ts,
            &Cap::none(),
            0,
        )
        .unwrap();
        assert_eq!(report.n_splits, 5);
        assert_eq!(report.signed_errors, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn error_statistics_match_hand_computation() {
        let ts = sort_like_set(&[11.0, 12.0, 13.0, 14.0]);
        let mut catalog = ModelCatalog::empty();
        catalog.register(Box::new(FixedFactory { value: 10.0 })).unwrap();
        let report =
            cross_validate(&catalog, &ModelId::Custom("fixed".into()), &ts, &Cap::none(), 0).unwrap();
        // Signed errors are 1, 2, 3, 4.
        assert_relative_eq!(report.mu, 2.5, epsilon = 1e-12);
        assert_relative_eq!(report.sigma, 1.118033988749895, epsilon = 1e-12);
        let expected_mape = (1.0 / 11.0 + 2.0 / 12.0 + 3.0 / 13.0 + 4.0 / 14.0) / 4.0;
        assert_relative_eq!(report.mape, expected_mape, epsilon = 1e-12);
        let (mu, sigma) = error_quantile_inputs(&report).unwrap();
        assert_eq!((mu, sigma), (report.mu, report.sigma));
    }

    #[test]
    fn capped_splits_subsample_deterministically() {
        let ts = sort_like_set(&(0..10).map(|i| 100.0 + i as f64).collect::<Vec<_>>());
        let mut catalog = ModelCatalog::empty();
        catalog.register(Box::new(FixedFactory { value: 10.0 })).unwrap();
        let id = ModelId::Custom("fixed".into());
        let a = cross_validate(&catalog, &id, &ts, &Cap::splits(4), 7).unwrap();
        let b = cross_validate(&catalog, &id, &ts, &Cap::splits(4), 7).unwrap();
        assert_eq!(a.n_splits, 4);
        assert_eq!(a.seed, 7);
        assert_eq!(a.signed_errors, b.signed_errors);
        let c = cross_validate(&catalog, &id, &ts, &Cap::splits(4), 8).unwrap();
        assert_ne!(a.signed_errors, c.signed_errors);
    }

    #[test]
    fn failing_fits_degrade_to_mean_prediction() {
        let ts = sort_like_set(&[10.0, 20.0, 30.0]);
        let mut catalog = ModelCatalog::empty();
        catalog.register(Box::new(FailingFactory)).unwrap();
        let report =
            cross_validate(&catalog, &ModelId::Custom("broken".into()), &ts, &Cap::none(), 0)
                .unwrap();
        assert_eq!(report.n_splits, 3);
        // Each prediction is the mean of the two remaining runtimes.
        assert_eq!(report.signed_errors, vec![10.0 - 25.0, 20.0 - 20.0, 30.0 - 15.0]);
        assert!(report.mape.is_finite());
    }

    #[test]
    fn selection_prefers_lower_mape_and_breaks_ties_by_order() {
        let ts = sort_like_set(&[100.0, 101.0, 102.0, 103.0]);
        let mut catalog = ModelCatalog::empty();
        struct Named(&'static str, f64);
        impl ModelFactory for Named {
            fn id(&self) -> ModelId {
                ModelId::Custom(self.0.into())
            }
            fn fit(
                &self,
                x: &crate::dataset::FeatureMatrix,
                _y: &[f64],
            ) -> Result<FittedModel, ModelError> {
                Ok(FittedModel::from_parts(
                    self.id(),
                    x.fingerprint(),
                    Box::new(ConstantModel { value: self.1 }),
                ))
            }
        }
        catalog.register(Box::new(Named("coarse", 90.0))).unwrap();
        catalog.register(Box::new(Named("close-a", 101.0))).unwrap();
        catalog.register(Box::new(Named("close-b", 101.0))).unwrap();

        let candidates: Vec<ModelId> = ["coarse", "close-a", "close-b"]
            .iter()
            .map(|n| ModelId::Custom((*n).into()))
            .collect();
        let (winner, report) = select_model(&catalog, &candidates, &ts, &Cap::none(), 0).unwrap();
        assert_eq!(winner, ModelId::Custom("close-a".into()));
        assert_eq!(report.model_id, winner);

        let reordered: Vec<ModelId> = ["close-b", "close-a", "coarse"]
            .iter()
            .map(|n| ModelId::Custom((*n).into()))
            .collect();
        let (winner2, _) = select_model(&catalog, &reordered, &ts, &Cap::none(), 0).unwrap();
        assert_eq!(winner2, ModelId::Custom("close-b".into()));
    }

    #[test]
    fn too_few_records_is_an_error() {
        let ts = sort_like_set(&[10.0]);
        let catalog = ModelCatalog::with_defaults();
        let err = cross_validate(&catalog, &ModelId::Gbm, &ts, &Cap::none(), 0).unwrap_err();
        assert!(matches!(err, SelectionError::TooFewRecords { found: 1 }));
    }

    #[test]
    fn quantile_inputs_need_two_splits() {
        let report = CvReport {
            model_id: ModelId::Gbm,
            signed_errors: vec![1.0],
            mape: 0.1,
            mu: 1.0,
            sigma: 0.0,
            n_splits: 1,
            seed: 0,
        };
        assert!(matches!(
            error_quantile_inputs(&report),
            Err(SelectionError::TooFewSplits { found: 1 })
        ));
    }

    #[test]
    fn duplicate_records_extend_splits_without_disturbing_order() {
        let ts = sort_like_set(&[10.0, 20.0, 30.0]);
        let dup = ts.with_extra(&[ts.records()[1].clone()]).unwrap();
        let mut catalog = ModelCatalog::empty();
        catalog.register(Box::new(FixedFactory { value: 5.0 })).unwrap();
        let report =
            cross_validate(&catalog, &ModelId::Custom("fixed".into()), &dup, &Cap::none(), 0)
                .unwrap();
        assert_eq!(report.n_splits, 4);
        assert_eq!(report.signed_errors, vec![5.0, 15.0, 25.0, 15.0]);
    }

    #[test]
    fn trained_predictor_uses_selected_model_on_full_set() {
        let ts = sort_like_set(&[1000.0, 1100.0, 1200.0, 1300.0, 1400.0, 1500.0]);
        let catalog = ModelCatalog::with_defaults();
        let predictor =
            train_predictor(&catalog, &[ModelId::Gbm, ModelId::Ernest], &ts, &Cap::none(), 3)
                .unwrap();
        assert!(matches!(predictor.selected(), ModelId::Gbm | ModelId::Ernest));
        let p = predictor.predict_query("m5.xlarge", 2, &[CtxValue::Num(12.0)]);
        assert!(p >= MIN_PREDICTION_MS);
        assert!(p.is_finite());
    }
}
