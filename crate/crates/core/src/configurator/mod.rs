//! From runtime predictions to a concrete cluster configuration.
//!
//! The configurator turns per-scale-out runtime predictions plus the
//! cross-validated error distribution into a plan: for every scale-out in
//! the requested domain it tabulates predicted runtime, cost, deadline
//! feasibility, and a memory-bottleneck flag, then picks the scale-out to
//! run.
//!
//! Deadline feasibility is conservative. Prediction errors
//! `actual - predicted` are treated as Gaussian with the cross-validated
//! `(mu, sigma)`; a scale-out counts as feasible only when the prediction
//! plus the one-sided error margin at the requested confidence still meets
//! the deadline.

mod erf;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dataset::TrainingSet;

/// Default confidence for deadline feasibility.
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Default multiplier for the memory-bottleneck heuristic: the cluster
/// should hold the dataset with 50% headroom.
pub const DEFAULT_MEMORY_HEADROOM: f64 = 1.5;

/// Milliseconds per hour, for price-per-hour cost accounting.
const MS_PER_HOUR: f64 = 3_600_000.0;

/// Errors from configuration planning.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("inverse error function is defined only on (-1, 1), got {p}")]
    DomainError { p: f64 },
    #[error(
        "no scale-out meets the deadline; best achievable runtime plus margin \
         is {best_total_ms} ms at scale-out {best_scale_out}"
    )]
    NoFeasibleScaleOut { best_scale_out: u32, best_total_ms: f64 },
    #[error("no machine type has both runtime data and a price catalog entry")]
    NoUsableMachineType,
    #[error("machine type {machine_type:?} is not in the price catalog")]
    UnknownMachineType { machine_type: String },
    #[error("scale-out domain is empty")]
    EmptyScaleOutDomain,
    #[error("malformed price catalog at line {line}: {reason}")]
    PriceCatalog { line: usize, reason: String },
    #[error("invalid request: {reason}")]
    InvalidRequest { reason: String },
}

/// Inverse error function.
///
/// Defined for `|p| < 1`; implemented as a rational initial approximation
/// refined by Newton steps against a high-accuracy `erf`. Odd by
/// construction and accurate to well below 1e-7 in the round trip.
pub fn inv_erf(p: f64) -> Result<f64, ConfigError> {
    if !(p > -1.0 && p < 1.0) {
        return Err(ConfigError::DomainError { p });
    }
    Ok(erf::inv_erf_unchecked(p))
}

/// One-sided error margin at the given confidence.
///
/// For Gaussian signed errors with mean `mu` and deviation `sigma`, the
/// margin `epsilon` satisfies `P(error <= epsilon) = confidence`:
///
/// ```text
/// epsilon = mu + sqrt(2) * inv_erf(2 * confidence - 1) * sigma
/// ```
pub fn epsilon_c(mu: f64, sigma: f64, confidence: f64) -> Result<f64, ConfigError> {
    debug_assert!(sigma >= 0.0, "sigma is a standard deviation");
    let quantile = inv_erf(2.0 * confidence - 1.0)?;
    Ok(mu + std::f64::consts::SQRT_2 * quantile * sigma)
}

/// Machine categories as advertised by cloud providers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineCategory {
    General,
    Compute,
    Memory,
    Storage,
}

impl fmt::Display for MachineCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MachineCategory::General => "general",
            MachineCategory::Compute => "compute",
            MachineCategory::Memory => "memory",
            MachineCategory::Storage => "storage",
        };
        write!(f, "{name}")
    }
}

impl FromStr for MachineCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "general" => Ok(MachineCategory::General),
            "compute" => Ok(MachineCategory::Compute),
            "memory" => Ok(MachineCategory::Memory),
            "storage" => Ok(MachineCategory::Storage),
            other => Err(format!("unknown machine category {other:?}")),
        }
    }
}

/// Price and capacity of one machine type.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceEntry {
    pub price_per_hour: f64,
    pub memory_gb: f64,
    pub category: MachineCategory,
}

/// The machine-type price catalog.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PriceCatalog {
    entries: BTreeMap<String, PriceEntry>,
}

impl PriceCatalog {
    /// Parses the catalog TSV:
    /// `machine_type  price_per_hour  memory_gb  category`.
    pub fn parse_tsv(text: &str) -> Result<PriceCatalog, ConfigError> {
        const HEADER: &str = "machine_type\tprice_per_hour\tmemory_gb\tcategory";
        let mut entries = BTreeMap::new();
        let mut saw_header = false;
        for (idx, raw) in text.split('\n').enumerate() {
            let line_no = idx + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.is_empty() {
                continue;
            }
            if !saw_header {
                if line != HEADER {
                    return Err(ConfigError::PriceCatalog {
                        line: line_no,
                        reason: format!("expected header {HEADER:?}"),
                    });
                }
                saw_header = true;
                continue;
            }
            let bad = |reason: String| ConfigError::PriceCatalog { line: line_no, reason };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(bad(format!("expected 4 fields, found {}", fields.len())));
            }
            let machine_type = fields[0].to_string();
            if machine_type.is_empty() {
                return Err(bad("machine_type must not be empty".into()));
            }
            let price_per_hour: f64 = fields[1]
                .parse()
                .map_err(|_| bad(format!("price {:?} is not numeric", fields[1])))?;
            let memory_gb: f64 = fields[2]
                .parse()
                .map_err(|_| bad(format!("memory {:?} is not numeric", fields[2])))?;
            if !(price_per_hour.is_finite() && price_per_hour > 0.0) {
                return Err(bad("price_per_hour must be positive".into()));
            }
            if !(memory_gb.is_finite() && memory_gb > 0.0) {
                return Err(bad("memory_gb must be positive".into()));
            }
            let category = fields[3].parse().map_err(|e: String| bad(e))?;
            if entries
                .insert(machine_type.clone(), PriceEntry { price_per_hour, memory_gb, category })
                .is_some()
            {
                return Err(bad(format!("machine type {machine_type:?} listed twice")));
            }
        }
        if !saw_header {
            return Err(ConfigError::PriceCatalog {
                line: 1,
                reason: "missing header".into(),
            });
        }
        Ok(PriceCatalog { entries })
    }

    pub fn get(&self, machine_type: &str) -> Option<&PriceEntry> {
        self.entries.get(machine_type)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &PriceEntry)> {
        self.entries.iter()
    }
}

/// What the user asks the configurator for.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigRequest {
    /// Deadline in milliseconds; `None` means cost-only planning.
    pub t_max_ms: Option<f64>,
    /// Confidence that the chosen scale-out meets the deadline.
    pub confidence: f64,
    /// Candidate scale-outs, ascending and deduplicated.
    pub scale_out_domain: Vec<u32>,
    /// Size of the dataset the job will process, for the memory heuristic.
    pub dataset_size_gb: f64,
    /// A maintainer-recommended machine type, honored unconditionally.
    pub maintainer_machine_type: Option<String>,
}

impl ConfigRequest {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |reason: &str| Err(ConfigError::InvalidRequest { reason: reason.into() });
        if self.scale_out_domain.is_empty() {
            return Err(ConfigError::EmptyScaleOutDomain);
        }
        if self.scale_out_domain.contains(&0) {
            return fail("scale-outs must be at least 1");
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return fail("confidence must lie strictly between 0 and 1");
        }
        if let Some(t) = self.t_max_ms {
            if !(t.is_finite() && t > 0.0) {
                return fail("deadline must be a positive number of milliseconds");
            }
        }
        if !(self.dataset_size_gb.is_finite() && self.dataset_size_gb > 0.0) {
            return fail("dataset size must be positive");
        }
        Ok(())
    }
}

/// True when `scale_out` machines of `memory_gb` each cannot hold the
/// dataset with the given headroom; such configurations tend to spill to
/// disk and violate the learned runtime behavior.
pub fn bottleneck_flag(scale_out: u32, memory_gb: f64, dataset_size_gb: f64, headroom: f64) -> bool {
    f64::from(scale_out) * memory_gb < headroom * dataset_size_gb
}

/// Picks the machine type to plan for.
///
/// A maintainer recommendation wins unconditionally (it must be priced).
/// Otherwise the choice falls to the general-category type with the most
/// runtime data, then to the most data overall; ties break toward the
/// lexicographically smaller name. Types without a catalog entry cannot be
/// priced and are never chosen.
pub fn choose_machine_type(
    maintainer: Option<&str>,
    catalog: &PriceCatalog,
    counts: &BTreeMap<String, usize>,
) -> Result<String, ConfigError> {
    if let Some(machine) = maintainer {
        if catalog.get(machine).is_none() {
            return Err(ConfigError::UnknownMachineType { machine_type: machine.to_string() });
        }
        return Ok(machine.to_string());
    }

    let with_data = |filter: &dyn Fn(&PriceEntry) -> bool| {
        let mut best: Option<(&String, usize)> = None;
        for (name, entry) in catalog.entries() {
            if !filter(entry) {
                continue;
            }
            let count = counts.get(name).copied().unwrap_or(0);
            if count == 0 {
                continue;
            }
            if best.is_none_or(|(_, c)| count > c) {
                best = Some((name, count));
            }
        }
        best.map(|(name, _)| name.clone())
    };

    with_data(&|e| e.category == MachineCategory::General)
        .or_else(|| with_data(&|_| true))
        .ok_or(ConfigError::NoUsableMachineType)
}

/// Convenience: machine choice directly from a training set.
pub fn choose_machine_type_from(
    maintainer: Option<&str>,
    catalog: &PriceCatalog,
    ts: &TrainingSet,
) -> Result<String, ConfigError> {
    choose_machine_type(maintainer, catalog, &ts.machine_type_counts())
}

/// The chosen scale-out, with a warning when only flagged options fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleOutChoice {
    pub scale_out: u32,
    pub bottleneck_warning: bool,
}

/// Picks the smallest scale-out that meets the deadline with margin.
///
/// Feasible means `t_s + epsilon_c <= t_max`. Bottleneck-flagged
/// scale-outs are skipped unless nothing else is feasible, in which case
/// the smallest flagged feasible one is returned with a warning. With no
/// feasible scale-out at all, the error carries the best achievable
/// `(scale_out, runtime + margin)`.
pub fn choose_scale_out(
    predictions: &BTreeMap<u32, f64>,
    mu: f64,
    sigma: f64,
    confidence: f64,
    t_max_ms: f64,
    flagged: impl Fn(u32) -> bool,
) -> Result<ScaleOutChoice, ConfigError> {
    if predictions.is_empty() {
        return Err(ConfigError::EmptyScaleOutDomain);
    }
    let eps = epsilon_c(mu, sigma, confidence)?;

    let feasible = |t: f64| t + eps <= t_max_ms;
    for (&s, &t) in predictions {
        if feasible(t) && !flagged(s) {
            return Ok(ScaleOutChoice { scale_out: s, bottleneck_warning: false });
        }
    }
    for (&s, &t) in predictions {
        if feasible(t) {
            return Ok(ScaleOutChoice { scale_out: s, bottleneck_warning: true });
        }
    }

    let (best_scale_out, best_total_ms) = predictions
        .iter()
        .map(|(&s, &t)| (s, t + eps))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("predictions is non-empty");
    Err(ConfigError::NoFeasibleScaleOut { best_scale_out, best_total_ms })
}

/// One scale-out option in a plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanRow {
    pub scale_out: u32,
    pub predicted_runtime_ms: f64,
    /// Cost of the run: hourly price, times runtime in hours, times machines.
    pub cost: f64,
    pub meets_deadline: bool,
    pub bottleneck: bool,
}

/// A complete configuration plan for one machine type.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPlan {
    pub machine_type: String,
    /// All requested scale-outs, ascending.
    pub rows: Vec<PlanRow>,
    pub chosen_scale_out: u32,
    /// True when the chosen scale-out is itself bottleneck-flagged.
    pub bottleneck_warning: bool,
    /// The error margin applied to the deadline, when one was set.
    pub epsilon_ms: Option<f64>,
    pub confidence: f64,
}

impl ClusterPlan {
    pub const TSV_HEADER: &'static str =
        "scale_out\tpredicted_runtime_ms\tcost\tmeets_deadline\tbottleneck\tchosen";

    /// The plan as a machine-readable TSV table.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(Self::TSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{}\t{:.3}\t{:.6}\t{}\t{}\t{}\n",
                row.scale_out,
                row.predicted_runtime_ms,
                row.cost,
                row.meets_deadline,
                row.bottleneck,
                row.scale_out == self.chosen_scale_out
            ));
        }
        out
    }
}

/// Builds the full plan: per-scale-out table plus the chosen scale-out.
///
/// With a deadline, the choice is the smallest feasible scale-out under
/// [`choose_scale_out`]. Without one, it is the cheapest unflagged
/// scale-out (ties to the smaller), falling back to the cheapest flagged
/// one with a warning.
pub fn build_plan(
    request: &ConfigRequest,
    catalog: &PriceCatalog,
    machine_type: &str,
    predictions: &BTreeMap<u32, f64>,
    mu: f64,
    sigma: f64,
) -> Result<ClusterPlan, ConfigError> {
    request.validate()?;
    let entry = catalog
        .get(machine_type)
        .ok_or_else(|| ConfigError::UnknownMachineType { machine_type: machine_type.to_string() })?;
    if predictions.is_empty() {
        return Err(ConfigError::EmptyScaleOutDomain);
    }

    let eps = match request.t_max_ms {
        Some(_) => Some(epsilon_c(mu, sigma, request.confidence)?),
        None => None,
    };
    let flagged = |s: u32| {
        bottleneck_flag(s, entry.memory_gb, request.dataset_size_gb, DEFAULT_MEMORY_HEADROOM)
    };

    let rows: Vec<PlanRow> = predictions
        .iter()
        .map(|(&s, &t)| PlanRow {
            scale_out: s,
            predicted_runtime_ms: t,
            cost: entry.price_per_hour * (t / MS_PER_HOUR) * f64::from(s),
            meets_deadline: match (request.t_max_ms, eps) {
                (Some(t_max), Some(eps)) => t + eps <= t_max,
                _ => true,
            },
            bottleneck: flagged(s),
        })
        .collect();

    let choice = match request.t_max_ms {
        Some(t_max) => {
            choose_scale_out(predictions, mu, sigma, request.confidence, t_max, flagged)?
        }
        None => cheapest(&rows).ok_or(ConfigError::EmptyScaleOutDomain)?,
    };

    Ok(ClusterPlan {
        machine_type: machine_type.to_string(),
        rows,
        chosen_scale_out: choice.scale_out,
        bottleneck_warning: choice.bottleneck_warning,
        epsilon_ms: eps,
        confidence: request.confidence,
    })
}

/// Cheapest unflagged row, ties to the smaller scale-out; flagged rows are
/// a last resort and carry a warning.
fn cheapest(rows: &[PlanRow]) -> Option<ScaleOutChoice> {
    let pick = |candidates: &mut dyn Iterator<Item = &PlanRow>| {
        candidates
            .min_by(|a, b| a.cost.total_cmp(&b.cost).then(a.scale_out.cmp(&b.scale_out)))
            .map(|r| r.scale_out)
    };
    if let Some(s) = pick(&mut rows.iter().filter(|r| !r.bottleneck)) {
        return Some(ScaleOutChoice { scale_out: s, bottleneck_warning: false });
    }
    pick(&mut rows.iter()).map(|s| ScaleOutChoice { scale_out: s, bottleneck_warning: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const CATALOG_TSV: &str = "machine_type\tprice_per_hour\tmemory_gb\tcategory\n\
        m5.xlarge\t0.2\t16\tgeneral\n\
        c5.xlarge\t0.17\t8\tcompute\n\
        r5.xlarge\t0.25\t32\tmemory\n";

    fn catalog() -> PriceCatalog {
        PriceCatalog::parse_tsv(CATALOG_TSV).unwrap()
    }

    #[test]
    fn inv_erf_rejects_out_of_domain_inputs() {
        for p in [1.0, -1.0, 1.5, -2.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(inv_erf(p), Err(ConfigError::DomainError { .. })));
        }
        assert_eq!(inv_erf(0.0).unwrap(), 0.0);
    }

    #[test]
    fn margin_uses_the_95_percent_quantile() {
        let eps = epsilon_c(0.0, 60_000.0, 0.95).unwrap();
        assert_relative_eq!(eps, 1.6448536269514722 * 60_000.0, max_relative = 1e-9);
        let shifted = epsilon_c(-5_000.0, 60_000.0, 0.95).unwrap();
        assert_relative_eq!(shifted, eps - 5_000.0, max_relative = 1e-9);
    }

    #[test]
    fn margin_is_mu_at_half_confidence_and_grows_with_confidence() {
        assert_relative_eq!(epsilon_c(123.0, 500.0, 0.5).unwrap(), 123.0, epsilon = 1e-9);
        let mut last = f64::NEG_INFINITY;
        for c in [0.5, 0.8, 0.95, 0.99] {
            let eps = epsilon_c(0.0, 1000.0, c).unwrap();
            assert!(eps > last);
            last = eps;
        }
    }

    #[test]
    fn zero_sigma_margin_is_exactly_mu() {
        assert_eq!(epsilon_c(42.0, 0.0, 0.999).unwrap(), 42.0);
    }

    #[test]
    fn price_catalog_parses_and_validates() {
        let catalog = catalog();
        let entry = catalog.get("m5.xlarge").unwrap();
        assert_eq!(entry.price_per_hour, 0.2);
        assert_eq!(entry.memory_gb, 16.0);
        assert_eq!(entry.category, MachineCategory::General);

        let bad = "machine_type\tprice_per_hour\tmemory_gb\tcategory\nx\t0\t16\tgeneral\n";
        assert!(matches!(
            PriceCatalog::parse_tsv(bad),
            Err(ConfigError::PriceCatalog { line: 2, .. })
        ));
        let dup = format!("{CATALOG_TSV}m5.xlarge\t0.3\t16\tgeneral\n");
        assert!(PriceCatalog::parse_tsv(&dup).is_err());
    }

    #[test]
    fn bottleneck_flags_insufficient_cluster_memory() {
        // 4 x 16 GB = 64 GB < 1.5 * 50 GB.
        assert!(bottleneck_flag(4, 16.0, 50.0, 1.5));
        // 8 x 16 GB = 128 GB >= 75 GB.
        assert!(!bottleneck_flag(8, 16.0, 50.0, 1.5));
    }

    #[test]
    fn maintainer_recommendation_wins_unconditionally() {
        let counts = BTreeMap::from([("m5.xlarge".to_string(), 500)]);
        let chosen = choose_machine_type(Some("r5.xlarge"), &catalog(), &counts).unwrap();
        assert_eq!(chosen, "r5.xlarge");
        let err = choose_machine_type(Some("z9.mega"), &catalog(), &counts).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownMachineType { .. }));
    }

    #[test]
    fn fallback_prefers_general_with_data_then_most_data() {
        let counts = BTreeMap::from([
            ("m5.xlarge".to_string(), 10),
            ("c5.xlarge".to_string(), 400),
        ]);
        assert_eq!(choose_machine_type(None, &catalog(), &counts).unwrap(), "m5.xlarge");

        let counts = BTreeMap::from([
            ("c5.xlarge".to_string(), 400),
            ("r5.xlarge".to_string(), 30),
        ]);
        assert_eq!(choose_machine_type(None, &catalog(), &counts).unwrap(), "c5.xlarge");

        assert!(matches!(
            choose_machine_type(None, &catalog(), &BTreeMap::new()),
            Err(ConfigError::NoUsableMachineType)
        ));
    }

    #[test]
    fn scale_out_choice_is_smallest_feasible_with_margin() {
        let predictions = BTreeMap::from([(4u32, 500_000.0), (8u32, 490_000.0)]);
        let choice =
            choose_scale_out(&predictions, 0.0, 60_000.0, 0.95, 600_000.0, |_| false).unwrap();
        assert_eq!(choice.scale_out, 4);
        assert!(!choice.bottleneck_warning);

        // A slightly wider error distribution pushes scale-out 4 over the deadline.
        let choice =
            choose_scale_out(&predictions, 0.0, 61_000.0, 0.95, 600_000.0, |_| false).unwrap();
        assert_eq!(choice.scale_out, 8);
    }

    #[test]
    fn infeasible_deadline_reports_best_achievable() {
        let predictions = BTreeMap::from([(4u32, 500_000.0), (8u32, 490_000.0)]);
        let err =
            choose_scale_out(&predictions, 0.0, 60_000.0, 0.95, 300_000.0, |_| false).unwrap_err();
        match err {
            ConfigError::NoFeasibleScaleOut { best_scale_out, best_total_ms } => {
                assert_eq!(best_scale_out, 8);
                assert_relative_eq!(
                    best_total_ms,
                    490_000.0 + 1.6448536269514722 * 60_000.0,
                    max_relative = 1e-9
                );
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn flagged_scale_outs_are_last_resort() {
        let predictions = BTreeMap::from([(2u32, 100.0), (4u32, 90.0), (8u32, 80.0)]);
        let choice =
            choose_scale_out(&predictions, 0.0, 0.0, 0.95, 1_000.0, |s| s == 2).unwrap();
        assert_eq!(choice.scale_out, 4);
        assert!(!choice.bottleneck_warning);

        let all_flagged =
            choose_scale_out(&predictions, 0.0, 0.0, 0.95, 1_000.0, |_| true).unwrap();
        assert_eq!(all_flagged.scale_out, 2);
        assert!(all_flagged.bottleneck_warning);
    }

    fn plain_request() -> ConfigRequest {
        ConfigRequest {
            t_max_ms: None,
            confidence: DEFAULT_CONFIDENCE,
            scale_out_domain: vec![2, 4],
            dataset_size_gb: 10.0,
            maintainer_machine_type: None,
        }
    }

    #[test]
    fn cost_follows_price_times_hours_times_machines() {
        let predictions = BTreeMap::from([(2u32, 1_800_000.0), (4u32, 1_080_000.0)]);
        let plan =
            build_plan(&plain_request(), &catalog(), "m5.xlarge", &predictions, 0.0, 0.0).unwrap();
        assert_relative_eq!(plan.rows[0].cost, 0.2, max_relative = 1e-12);
        assert_relative_eq!(plan.rows[1].cost, 0.24, max_relative = 1e-12);
        // Without a deadline the cheaper scale-out wins.
        assert_eq!(plan.chosen_scale_out, 2);
        assert_eq!(plan.epsilon_ms, None);
        assert!(plan.rows.iter().all(|r| r.meets_deadline));
    }

    #[test]
    fn deadline_plans_choose_smallest_feasible() {
        let mut request = plain_request();
        request.t_max_ms = Some(600_000.0);
        let predictions = BTreeMap::from([(2u32, 620_000.0), (4u32, 500_000.0)]);
        let plan =
            build_plan(&request, &catalog(), "m5.xlarge", &predictions, 0.0, 10_000.0).unwrap();
        assert_eq!(plan.chosen_scale_out, 4);
        assert!(!plan.rows[0].meets_deadline);
        assert!(plan.rows[1].meets_deadline);
        assert!(plan.epsilon_ms.is_some());
    }

    #[test]
    fn bottlenecked_rows_lose_to_cleaner_ones_on_cost() {
        // 60 GB dataset: scale-out 2 and 4 on 16 GB machines are flagged.
        let mut request = plain_request();
        request.dataset_size_gb = 60.0;
        request.scale_out_domain = vec![2, 4, 8];
        let predictions = BTreeMap::from([(2u32, 900_000.0), (4u32, 500_000.0), (8u32, 300_000.0)]);
        let plan =
            build_plan(&request, &catalog(), "m5.xlarge", &predictions, 0.0, 0.0).unwrap();
        assert!(plan.rows[0].bottleneck && plan.rows[1].bottleneck && !plan.rows[2].bottleneck);
        assert_eq!(plan.chosen_scale_out, 8);
        assert!(!plan.bottleneck_warning);
    }

    #[test]
    fn plan_tsv_marks_the_chosen_row() {
        let predictions = BTreeMap::from([(2u32, 1_800_000.0), (4u32, 1_080_000.0)]);
        let plan =
            build_plan(&plain_request(), &catalog(), "m5.xlarge", &predictions, 0.0, 0.0).unwrap();
        let tsv = plan.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], ClusterPlan::TSV_HEADER);
        assert!(lines[1].starts_with("2\t") && lines[1].ends_with("\ttrue"));
        assert!(lines[2].starts_with("4\t") && lines[2].ends_with("\tfalse"));
    }
}
