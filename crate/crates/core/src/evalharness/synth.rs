//! Synthetic job profiles with known runtime ground truth.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use super::HarnessError;
use crate::dataset::{ContextFeature, CtxValue, FeatureKind, JobSchema, RuntimeRecord, TrainingSet};
use crate::rng::rng_from_seed;

/// The five synthetic benchmark jobs.
///
/// Each mimics the scaling shape of a familiar dataflow workload: `Sort`
/// pays a merge overhead that grows with the cluster, `Grep` is
/// embarrassingly parallel, `Sgd` and `Kmeans` are iterative with
/// per-iteration synchronization, and `Pagerank` mixes per-machine work
/// with a convergence-dependent iteration count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum JobKind {
    Sort,
    Grep,
    Sgd,
    Kmeans,
    Pagerank,
}

impl JobKind {
    pub fn all() -> [JobKind; 5] {
        [JobKind::Sort, JobKind::Grep, JobKind::Sgd, JobKind::Kmeans, JobKind::Pagerank]
    }

    /// A stable tag for deriving per-job random seeds.
    pub(crate) fn seed_tag(self) -> u64 {
        match self {
            JobKind::Sort => 0x536f7274,
            JobKind::Grep => 0x47726570,
            JobKind::Sgd => 0x536764,
            JobKind::Kmeans => 0x4b6d65616e73,
            JobKind::Pagerank => 0x506167657261,
        }
    }
}

impl fmt::Display for JobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            JobKind::Sort => "sort",
            JobKind::Grep => "grep",
            JobKind::Sgd => "sgd",
            JobKind::Kmeans => "kmeans",
            JobKind::Pagerank => "pagerank",
        };
        write!(f, "{name}")
    }
}

impl FromStr for JobKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sort" => Ok(JobKind::Sort),
            "grep" => Ok(JobKind::Grep),
            "sgd" => Ok(JobKind::Sgd),
            "kmeans" => Ok(JobKind::Kmeans),
            "pagerank" => Ok(JobKind::Pagerank),
            other => Err(format!(
                "unknown job {other:?}; expected one of sort, grep, sgd, kmeans, pagerank"
            )),
        }
    }
}

/// A synthetic job: schema, value grids, noise model, and ground truth.
#[derive(Clone)]
pub struct JobProfile {
    pub kind: JobKind,
    schema: JobSchema,
    pub machine_type: String,
    pub scale_outs: Vec<u32>,
    /// Per-feature value grids; generation samples each uniformly.
    levels: Vec<Vec<CtxValue>>,
    /// Relative noise: runtimes are the truth times `exp(N(0, sigma_rel))`.
    pub sigma_rel: f64,
    /// Report the median of five noisy draws per record, mimicking the
    /// usual repeat-runs measurement protocol.
    pub median_of_five: bool,
    truth: fn(f64, &[CtxValue]) -> f64,
}

impl fmt::Debug for JobProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JobProfile")
            .field("kind", &self.kind)
            .field("machine_type", &self.machine_type)
            .field("scale_outs", &self.scale_outs)
            .field("sigma_rel", &self.sigma_rel)
            .field("median_of_five", &self.median_of_five)
            .finish_non_exhaustive()
    }
}

fn num(ctx: &[CtxValue], i: usize) -> f64 {
    ctx[i].as_num().expect("feature declared numeric")
}

fn numeric(name: &str) -> ContextFeature {
    ContextFeature { name: name.into(), kind: FeatureKind::Numeric }
}

fn grid(values: &[f64]) -> Vec<CtxValue> {
    values.iter().copied().map(CtxValue::Num).collect()
}

fn sort_truth(s: f64, ctx: &[CtxValue]) -> f64 {
    let size_gb = num(ctx, 0);
    9_000.0 * size_gb * (1.0 / s + 0.05 * s.ln())
}

fn grep_truth(s: f64, ctx: &[CtxValue]) -> f64 {
    let size_gb = num(ctx, 0);
    let hit_ratio = num(ctx, 1);
    let pattern_cost = match &ctx[2] {
        CtxValue::Cat(class) if class == "regex" => 1.35,
        _ => 1.0,
    };
    6_500.0 * size_gb / s * (1.0 + 0.6 * hit_ratio) * pattern_cost
}

fn sgd_truth(s: f64, ctx: &[CtxValue]) -> f64 {
    let size_gb = num(ctx, 0);
    let iterations = num(ctx, 1);
    // ctx[2] (feature dimensionality) deliberately does not enter: one
    // profile should carry an uninformative column. The 15 s offset is
    // driver startup plus data distribution.
    15_000.0 + 180.0 * size_gb * iterations / s + 40.0 * iterations
}

fn kmeans_truth(s: f64, ctx: &[CtxValue]) -> f64 {
    let size_gb = num(ctx, 0);
    let clusters = num(ctx, 1);
    12_000.0 + 2_200.0 * size_gb * clusters / s + 150.0 * clusters * s
}

fn pagerank_truth(s: f64, ctx: &[CtxValue]) -> f64 {
    let pages = num(ctx, 0);
    let convergence = num(ctx, 1);
    let iterations = (1.0 / convergence).ln();
    0.09 * pages * iterations / s + 0.012 * pages
}

impl JobProfile {
    pub fn new(kind: JobKind) -> JobProfile {
        let (features, levels, truth): (Vec<ContextFeature>, Vec<Vec<CtxValue>>, _) = match kind {
            JobKind::Sort => (
                vec![numeric("size_gb")],
                vec![grid(&[5.0, 10.0, 15.0, 20.0, 25.0, 30.0])],
                sort_truth as fn(f64, &[CtxValue]) -> f64,
            ),
            JobKind::Grep => (
                vec![
                    numeric("size_gb"),
                    numeric("hit_ratio"),
                    ContextFeature { name: "pattern_class".into(), kind: FeatureKind::Categorical },
                ],
                vec![
                    grid(&[5.0, 10.0, 15.0, 20.0, 25.0, 30.0]),
                    grid(&[0.05, 0.1, 0.2, 0.4]),
                    vec![CtxValue::Cat("plain".into()), CtxValue::Cat("regex".into())],
                ],
                grep_truth,
            ),
            JobKind::Sgd => (
                vec![numeric("size_gb"), numeric("iterations"), numeric("dimensions")],
                vec![
                    grid(&[2.0, 4.0, 8.0, 16.0]),
                    grid(&[20.0, 40.0, 60.0, 80.0]),
                    grid(&[8.0, 32.0, 128.0]),
                ],
                sgd_truth,
            ),
            JobKind::Kmeans => (
                vec![numeric("size_gb"), numeric("clusters")],
                vec![grid(&[2.0, 4.0, 8.0, 16.0]), grid(&[3.0, 5.0, 7.0, 9.0])],
                kmeans_truth,
            ),
            JobKind::Pagerank => (
                vec![numeric("pages"), numeric("convergence")],
                vec![
                    grid(&[200_000.0, 400_000.0, 600_000.0, 800_000.0]),
                    grid(&[1e-3, 1e-4]),
                ],
                pagerank_truth,
            ),
        };
        let schema = JobSchema::new(kind.to_string(), features)
            .expect("profile schemas are well formed");
        JobProfile {
            kind,
            schema,
            machine_type: "m5.xlarge".into(),
            scale_outs: vec![2, 4, 6, 8, 10, 12],
            levels,
            sigma_rel: 0.02,
            median_of_five: true,
            truth,
        }
    }

    pub fn all() -> Vec<JobProfile> {
        JobKind::all().into_iter().map(JobProfile::new).collect()
    }

    pub fn schema(&self) -> &JobSchema {
        &self.schema
    }

    /// Noise-free runtime at a scale-out and context, in milliseconds.
    pub fn true_runtime(&self, scale_out: u32, context: &[CtxValue]) -> f64 {
        (self.truth)(f64::from(scale_out), context)
    }

    /// Collapses every feature grid to its first value, so all generated
    /// records share one context. Useful for degenerate-case checks.
    pub fn with_single_context(mut self) -> JobProfile {
        for level in &mut self.levels {
            level.truncate(1);
        }
        self
    }

    /// Every combination of context levels, in feature order.
    pub fn context_grid(&self) -> Vec<Vec<CtxValue>> {
        let mut grid: Vec<Vec<CtxValue>> = vec![Vec::new()];
        for level in &self.levels {
            grid = grid
                .into_iter()
                .flat_map(|prefix| {
                    level.iter().map(move |value| {
                        let mut ctx = prefix.clone();
                        ctx.push(value.clone());
                        ctx
                    })
                })
                .collect();
        }
        grid
    }

    /// Draws `n` noisy records, reproducibly from `seed`.
    pub fn generate(&self, n: usize, seed: u64) -> Result<TrainingSet, HarnessError> {
        if n == 0 {
            return Err(HarnessError::EmptyGeneration);
        }
        let mut noisy = self.noise_source(seed)?;
        let mut records = Vec::with_capacity(n);
        for _ in 0..n {
            let scale_out = *self.scale_outs.choose(noisy.rng()).expect("non-empty scale-outs");
            let context: Vec<CtxValue> = self
                .levels
                .iter()
                .map(|level| {
                    let i = noisy.rng().gen_range(0..level.len());
                    level[i].clone()
                })
                .collect();
            records.push(self.measure(scale_out, context, &mut noisy));
        }
        Ok(TrainingSet::new(self.schema.clone(), records)?)
    }

    /// Generates a designed sweep instead of a random sample: `reps`
    /// measurements for every combination of context levels and
    /// scale-out, in a fixed order.
    pub fn generate_factorial(&self, reps: usize, seed: u64) -> Result<TrainingSet, HarnessError> {
        if reps == 0 {
            return Err(HarnessError::EmptyGeneration);
        }
        let mut noisy = self.noise_source(seed)?;
        let grid = self.context_grid();
        let mut records = Vec::with_capacity(grid.len() * self.scale_outs.len() * reps);
        for context in grid {
            for &scale_out in &self.scale_outs {
                for _ in 0..reps {
                    records.push(self.measure(scale_out, context.clone(), &mut noisy));
                }
            }
        }
        Ok(TrainingSet::new(self.schema.clone(), records)?)
    }

    fn noise_source(&self, seed: u64) -> Result<NoiseSource, HarnessError> {
        if !(self.sigma_rel.is_finite() && self.sigma_rel >= 0.0) {
            return Err(HarnessError::InvalidNoise { value: self.sigma_rel });
        }
        let noise = Normal::new(0.0, self.sigma_rel)
            .map_err(|_| HarnessError::InvalidNoise { value: self.sigma_rel })?;
        Ok(NoiseSource { rng: rng_from_seed(seed), noise })
    }

    fn measure(&self, scale_out: u32, context: Vec<CtxValue>, noisy: &mut NoiseSource) -> RuntimeRecord {
        let truth = self.true_runtime(scale_out, &context);
        let runtime = if self.median_of_five {
            let mut reruns = [
                noisy.draw(truth),
                noisy.draw(truth),
                noisy.draw(truth),
                noisy.draw(truth),
                noisy.draw(truth),
            ];
            reruns.sort_by(f64::total_cmp);
            reruns[2]
        } else {
            noisy.draw(truth)
        };
        RuntimeRecord {
            machine_type: self.machine_type.clone(),
            instance_count: scale_out,
            context,
            gross_runtime_ms: runtime,
        }
    }
}

/// Seeded multiplicative log-normal measurement noise.
struct NoiseSource {
    rng: ChaCha20Rng,
    noise: Normal<f64>,
}

impl NoiseSource {
    fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    fn draw(&mut self, truth: f64) -> f64 {
        truth * self.noise.sample(&mut self.rng).exp()
    }
}
