//! The two standard experiments and their report format.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use rand::Rng;

use super::{HarnessError, JobKind, JobProfile};
use crate::dataset::{Encoder, TrainingSet};
use crate::models::{ConstantModel, FittedModel, ModelCatalog, ModelId};
use crate::rng::{derive_seed, rng_from_seed};
use crate::selection::{train_predictor, Cap, FALLBACK_MODEL_NAME};

/// Report label for the cross-validated composed predictor, which picks
/// among the individual models per training set.
pub const PREDICTOR_LABEL: &str = "predictor";

/// Smallest context partition worth holding test data out of.
const MIN_PARTITION: usize = 5;

/// What slice of data a measurement was trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Records from the test rows' own context partition only.
    Local,
    /// All records except the test rows.
    Global,
    /// A training set truncated to the given number of records.
    TrainingSize(usize),
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Local => write!(f, "local"),
            Scenario::Global => write!(f, "global"),
            Scenario::TrainingSize(k) => write!(f, "n={k}"),
        }
    }
}

/// One aggregated measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub job: JobKind,
    /// A model id string, or [`PREDICTOR_LABEL`].
    pub model: String,
    pub scenario: Scenario,
    pub mean_mape: f64,
    pub reps: usize,
}

/// All measurements of one experiment run, in deterministic order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub const TSV_HEADER: &'static str = "job\tmodel\tscenario\tmean_mape\treps";

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(Self::TSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{:.6}\t{}\n",
                row.job, row.model, row.scenario, row.mean_mape, row.reps
            ));
        }
        out
    }

    /// Looks up one measurement; handy in assertions.
    pub fn get(&self, job: JobKind, model: &str, scenario: Scenario) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.job == job && r.model == model && r.scenario == scenario)
            .map(|r| r.mean_mape)
    }

    /// Writes per-job CSV files for plotting into `dir` and returns their
    /// paths. Origin-style rows land in `<job>_origin.csv`, training-size
    /// rows in `<job>_availability.csv`.
    pub fn emit_plot_data(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let jobs: Vec<JobKind> = {
            let mut seen = Vec::new();
            for row in &self.rows {
                if !seen.contains(&row.job) {
                    seen.push(row.job);
                }
            }
            seen
        };
        for job in jobs {
            let mut origin = String::from("model,scenario,mean_mape,reps\n");
            let mut origin_rows = 0;
            let mut availability = String::from("training_points,model,mean_mape,reps\n");
            let mut availability_rows = 0;
            for row in self.rows.iter().filter(|r| r.job == job) {
                match row.scenario {
                    Scenario::Local | Scenario::Global => {
                        origin.push_str(&format!(
                            "{},{},{},{}\n",
                            row.model, row.scenario, row.mean_mape, row.reps
                        ));
                        origin_rows += 1;
                    }
                    Scenario::TrainingSize(k) => {
                        availability.push_str(&format!(
                            "{},{},{},{}\n",
                            k, row.model, row.mean_mape, row.reps
                        ));
                        availability_rows += 1;
                    }
                }
            }
            for (name, content, n) in [
                (format!("{job}_origin.csv"), origin, origin_rows),
                (format!("{job}_availability.csv"), availability, availability_rows),
            ] {
                if n > 0 {
                    let path = dir.join(name);
                    std::fs::write(&path, content)?;
                    written.push(path);
                }
            }
        }
        Ok(written)
    }
}

/// Settings for [`experiment_origin`].
#[derive(Debug, Clone)]
pub struct OriginConfig {
    /// Records to generate per job and repetition.
    pub n_records: usize,
    pub reps: usize,
    /// Cross-validation cap for the composed predictor.
    pub cap: Cap,
    pub seed: u64,
}

impl Default for OriginConfig {
    fn default() -> Self {
        OriginConfig { n_records: 200, reps: 3, cap: Cap::splits(40), seed: 0 }
    }
}

/// Settings for [`experiment_availability`].
#[derive(Debug, Clone)]
pub struct AvailabilityConfig {
    /// Training-set sizes to sweep, each at least 2.
    pub training_sizes: Vec<usize>,
    /// Held-out records scored by every cell of the sweep.
    pub n_test: usize,
    pub reps: usize,
    pub cap: Cap,
    pub seed: u64,
}

impl Default for AvailabilityConfig {
    fn default() -> Self {
        AvailabilityConfig {
            training_sizes: (1..=10).map(|k| 3 * k).collect(),
            n_test: 20,
            reps: 3,
            cap: Cap::splits(20),
            seed: 0,
        }
    }
}

/// Does pooled data help? For each repetition, one context partition is
/// chosen and a fifth of it held out; every model then trains once on the
/// rest of that partition (local) and once on all remaining records
/// (global), and both are scored on the same holdout.
pub fn experiment_origin(
    profiles: &[JobProfile],
    cfg: &OriginConfig,
) -> Result<ExperimentReport, HarnessError> {
    if cfg.reps == 0 || cfg.n_records < 2 * MIN_PARTITION {
        return Err(HarnessError::InvalidConfig {
            reason: format!("need reps >= 1 and n_records >= {}", 2 * MIN_PARTITION),
        });
    }
    let catalog = ModelCatalog::with_defaults();
    let model_ids = catalog.ids();
    let mut report = ExperimentReport::default();

    for profile in profiles {
        let job_seed = derive_seed(cfg.seed, profile.kind.seed_tag());
        // Sums indexed by (model, scenario): models first, local then global.
        let n_cells = (model_ids.len() + 1) * 2;
        let mut sums = vec![0.0f64; n_cells];

        for rep in 0..cfg.reps {
            let rep_seed = derive_seed(job_seed, rep as u64);
            let ts = profile.generate(cfg.n_records, derive_seed(rep_seed, 0))?;

            let partitions = ts.local_partition_indices();
            let eligible: Vec<&Vec<usize>> =
                partitions.iter().filter(|p| p.len() >= MIN_PARTITION).collect();
            if eligible.is_empty() {
                return Err(HarnessError::NoEligiblePartition { min: MIN_PARTITION });
            }
            let mut rng = rng_from_seed(derive_seed(rep_seed, 1));
            let partition = eligible[rng.gen_range(0..eligible.len())];

            let n_test = (partition.len() / 5).max(1);
            let mut test_pos =
                rand::seq::index::sample(&mut rng, partition.len(), n_test).into_vec();
            test_pos.sort_unstable();
            let test_idx: Vec<usize> = test_pos.iter().map(|&p| partition[p]).collect();
            let local_train: Vec<usize> =
                partition.iter().copied().filter(|i| test_idx.binary_search(i).is_err()).collect();
            let global_train: Vec<usize> =
                (0..ts.len()).filter(|i| test_idx.binary_search(i).is_err()).collect();

            let test_set = ts.subset(&test_idx);
            let fit_seed = derive_seed(rep_seed, 2);
            for (scenario_slot, train_idx) in [(0usize, &local_train), (1usize, &global_train)] {
                let train = ts.subset(train_idx);
                for (m, id) in model_ids.iter().enumerate() {
                    let (model, encoder) = fit_single(&catalog, id, &train);
                    sums[m * 2 + scenario_slot] += mape(&model, &encoder, &test_set);
                }
                let predictor =
                    train_predictor(&catalog, &model_ids, &train, &cfg.cap, fit_seed)?;
                sums[model_ids.len() * 2 + scenario_slot] +=
                    mape(predictor.model(), predictor.encoder(), &test_set);
            }
        }

        let labels: Vec<String> = model_ids
            .iter()
            .map(ToString::to_string)
            .chain(std::iter::once(PREDICTOR_LABEL.to_string()))
            .collect();
        for (m, label) in labels.iter().enumerate() {
            for (scenario_slot, scenario) in [(0usize, Scenario::Local), (1, Scenario::Global)] {
                report.rows.push(ReportRow {
                    job: profile.kind,
                    model: label.clone(),
                    scenario,
                    mean_mape: sums[m * 2 + scenario_slot] / cfg.reps as f64,
                    reps: cfg.reps,
                });
            }
        }
    }
    Ok(report)
}

/// How does accuracy scale with data volume? Each repetition generates one
/// dataset, fixes a test slice, and trains every model on growing prefixes
/// of the remaining records.
pub fn experiment_availability(
    profiles: &[JobProfile],
    cfg: &AvailabilityConfig,
) -> Result<ExperimentReport, HarnessError> {
    if cfg.reps == 0 || cfg.n_test == 0 || cfg.training_sizes.is_empty() {
        return Err(HarnessError::InvalidConfig {
            reason: "need reps >= 1, n_test >= 1, and at least one training size".into(),
        });
    }
    if cfg.training_sizes.iter().any(|&k| k < 2) {
        return Err(HarnessError::InvalidConfig {
            reason: "training sizes below 2 cannot be cross-validated".into(),
        });
    }
    let max_k = *cfg.training_sizes.iter().max().expect("non-empty sizes");
    let n_records = max_k + cfg.n_test;

    let catalog = ModelCatalog::with_defaults();
    let model_ids = catalog.ids();
    let mut report = ExperimentReport::default();

    for profile in profiles {
        let job_seed = derive_seed(cfg.seed, profile.kind.seed_tag());
        let n_models = model_ids.len() + 1;
        let mut sums = vec![0.0f64; n_models * cfg.training_sizes.len()];

        for rep in 0..cfg.reps {
            let rep_seed = derive_seed(job_seed, rep as u64);
            let ts = profile.generate(n_records, derive_seed(rep_seed, 0))?;

            // One random split per rep: a fixed test slice, and a shuffled
            // pool whose prefixes form the nested training sets.
            let mut rng = rng_from_seed(derive_seed(rep_seed, 1));
            let perm = rand::seq::index::sample(&mut rng, n_records, n_records).into_vec();
            let mut test_idx = perm[..cfg.n_test].to_vec();
            test_idx.sort_unstable();
            let pool = &perm[cfg.n_test..];
            let test_set = ts.subset(&test_idx);

            for (ki, &k) in cfg.training_sizes.iter().enumerate() {
                let mut train_idx = pool[..k].to_vec();
                train_idx.sort_unstable();
                let train = ts.subset(&train_idx);
                for (m, id) in model_ids.iter().enumerate() {
                    let (model, encoder) = fit_single(&catalog, id, &train);
                    sums[ki * n_models + m] += mape(&model, &encoder, &test_set);
                }
                let predictor = train_predictor(
                    &catalog,
                    &model_ids,
                    &train,
                    &cfg.cap,
                    derive_seed(rep_seed, 100 + k as u64),
                )?;
                sums[ki * n_models + model_ids.len()] +=
                    mape(predictor.model(), predictor.encoder(), &test_set);
            }
        }

        let labels: Vec<String> = model_ids
            .iter()
            .map(ToString::to_string)
            .chain(std::iter::once(PREDICTOR_LABEL.to_string()))
            .collect();
        for (m, label) in labels.iter().enumerate() {
            for (ki, &k) in cfg.training_sizes.iter().enumerate() {
                report.rows.push(ReportRow {
                    job: profile.kind,
                    model: label.clone(),
                    scenario: Scenario::TrainingSize(k),
                    mean_mape: sums[ki * n_models + m] / cfg.reps as f64,
                    reps: cfg.reps,
                });
            }
        }
    }
    Ok(report)
}

/// Fits one model on the whole training set, degrading to the training
/// mean when the fit is impossible, so experiment cells never go missing.
fn fit_single(catalog: &ModelCatalog, id: &ModelId, ts: &TrainingSet) -> (FittedModel, Encoder) {
    let encoder = Encoder::fit(ts);
    let (x, y) = encoder.encode_set(ts);
    let model = catalog
        .get(id)
        .expect("experiment models come from this catalog")
        .fit(&x, &y)
        .unwrap_or_else(|_| {
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            FittedModel::from_parts(
                ModelId::Custom(FALLBACK_MODEL_NAME.to_string()),
                x.fingerprint(),
                Box::new(ConstantModel { value: mean }),
            )
        });
    (model, encoder)
}

fn mape(model: &FittedModel, encoder: &Encoder, test: &TrainingSet) -> f64 {
    let total: f64 = test
        .records()
        .iter()
        .map(|r| {
            let row = encoder.encode_query(&r.machine_type, r.instance_count, &r.context);
            let predicted = model.predict(&row).expect("row from the paired encoder");
            ((r.gross_runtime_ms - predicted) / r.gross_runtime_ms).abs()
        })
        .sum();
    total / test.len() as f64
}
