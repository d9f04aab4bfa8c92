//! The six subcommand implementations.
//!
//! Commands print a human-readable summary to stdout and, when `--out` is
//! given, write the same result as TSV. Errors go to stderr with the exit
//! codes documented on [`CliError`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use runcast_core::configurator::{
    build_plan, choose_machine_type, ConfigError, ConfigRequest, PriceCatalog,
};
use runcast_core::dataset::{
    parse_tsv, serialize_record, serialize_tsv, JobSchema, RuntimeRecord, TrainingSet,
};
use runcast_core::evalharness::{
    experiment_availability, experiment_origin, AvailabilityConfig, JobKind, JobProfile,
    OriginConfig,
};
use runcast_core::models::{ModelCatalog, ModelId};
use runcast_core::selection::{train_predictor, Cap, TrainedPredictor};
use runcast_core::validation::validate_contribution;

use crate::{
    exprs, manifest, CliError, ConfigureArgs, EvalMode, EvaluateArgs, GenerateArgs, PredictArgs,
    RecordArgs, ValidateArgs,
};

fn input(err: impl ToString) -> CliError {
    CliError::Input(err.to_string())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_schema(path: &Path) -> Result<JobSchema, CliError> {
    JobSchema::parse(&read_file(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_data(path: &Path, schema: &JobSchema) -> Result<TrainingSet, CliError> {
    parse_tsv(&read_file(path)?, schema)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn build_catalog(
    manifest_path: Option<&PathBuf>,
) -> Result<(ModelCatalog, Vec<ModelId>), CliError> {
    let mut catalog = ModelCatalog::with_defaults();
    if let Some(path) = manifest_path {
        let text = read_file(path)?;
        let factories = manifest::parse_manifest(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        for factory in factories {
            catalog.register(Box::new(factory)).map_err(input)?;
        }
    }
    let ids = catalog.ids();
    Ok((catalog, ids))
}

/// The machine type with the most records, ties to the lexicographically
/// smaller name.
fn most_recorded_machine(ts: &TrainingSet, data_path: &Path) -> Result<String, CliError> {
    ts.machine_type_counts()
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(name, _)| name)
        .ok_or_else(|| CliError::Input(format!("{} holds no records", data_path.display())))
}

/// Trains a predictor on the chosen machine type's records and predicts
/// the requested scale-outs.
fn fit_and_predict(
    args: &PredictArgs,
    schema: &JobSchema,
    all: &TrainingSet,
    machine: &str,
) -> Result<(TrainedPredictor, BTreeMap<u32, f64>), CliError> {
    let ctx = exprs::parse_ctx(schema, &args.ctx).map_err(CliError::Input)?;
    let scale_outs = exprs::parse_scale_outs(&args.scaleouts).map_err(CliError::Input)?;
    let ts = all.filter_machine_type(machine);
    if ts.is_empty() {
        return Err(CliError::Input(format!(
            "no records for machine type {machine:?} in {}",
            args.data.display()
        )));
    }
    let (catalog, candidates) = build_catalog(args.manifest.as_ref())?;
    let cap = Cap { max_splits: Some(args.max_splits), time_budget_ms: args.time_budget_ms };
    let predictor =
        train_predictor(&catalog, &candidates, &ts, &cap, args.seed).map_err(input)?;
    let predictions = scale_outs
        .iter()
        .map(|&s| (s, predictor.predict_query(machine, s, &ctx)))
        .collect();
    Ok((predictor, predictions))
}

fn print_model_header(machine: &str, predictor: &TrainedPredictor) {
    let report = predictor.report();
    println!("machine type: {machine}");
    println!("selected model: {}", predictor.selected());
    if predictor.model().id() != predictor.selected() {
        println!("fitted as: {}", predictor.model().id());
    }
    println!(
        "cv error: mu {:.3} ms, sigma {:.3} ms, mape {:.4} ({} splits)",
        report.mu, report.sigma, report.mape, report.n_splits
    );
}

fn model_metadata(machine: &str, predictor: &TrainedPredictor, seed: u64) -> String {
    let report = predictor.report();
    let mut out = format!("# machine_type\t{machine}\n");
    out.push_str(&format!("# selected_model\t{}\n", predictor.selected()));
    if predictor.model().id() != predictor.selected() {
        out.push_str(&format!("# fitted_model\t{}\n", predictor.model().id()));
    }
    out.push_str(&format!(
        "# mu_ms\t{:.6}\n# sigma_ms\t{:.6}\n# mape\t{:.6}\n# n_splits\t{}\n# seed\t{seed}\n",
        report.mu, report.sigma, report.mape, report.n_splits
    ));
    out
}

pub fn predict(args: &PredictArgs) -> Result<i32, CliError> {
    let schema = load_schema(&args.schema)?;
    let all = load_data(&args.data, &schema)?;
    let machine = match &args.machine {
        Some(m) => m.clone(),
        None => most_recorded_machine(&all, &args.data)?,
    };
    let (predictor, predictions) = fit_and_predict(args, &schema, &all, &machine)?;

    print_model_header(&machine, &predictor);
    println!();
    println!("scale_out\tpredicted_runtime_ms");
    for (s, t) in &predictions {
        println!("{s}\t{t:.3}");
    }

    if let Some(out) = &args.out {
        let mut tsv = model_metadata(&machine, &predictor, args.seed);
        tsv.push_str("scale_out\tpredicted_runtime_ms\n");
        for (s, t) in &predictions {
            tsv.push_str(&format!("{s}\t{t:.3}\n"));
        }
        write_file(out, &tsv)?;
    }
    Ok(0)
}

pub fn configure(args: &ConfigureArgs) -> Result<i32, CliError> {
    let schema = load_schema(&args.predict.schema)?;
    let all = load_data(&args.predict.data, &schema)?;
    let prices = PriceCatalog::parse_tsv(&read_file(&args.prices)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.prices.display())))?;
    let machine =
        choose_machine_type(args.predict.machine.as_deref(), &prices, &all.machine_type_counts())
            .map_err(input)?;
    let (predictor, predictions) = fit_and_predict(&args.predict, &schema, &all, &machine)?;
    let report = predictor.report();

    let request = ConfigRequest {
        t_max_ms: args.tmax_ms,
        confidence: args.confidence,
        scale_out_domain: predictions.keys().copied().collect(),
        dataset_size_gb: args.dataset_size_gb,
        maintainer_machine_type: args.predict.machine.clone(),
    };
    let plan = build_plan(&request, &prices, &machine, &predictions, report.mu, report.sigma)
        .map_err(|e| match e {
            ConfigError::NoFeasibleScaleOut { .. } => CliError::Infeasible(e.to_string()),
            other => input(other),
        })?;

    print_model_header(&machine, &predictor);
    if let (Some(t_max), Some(eps)) = (args.tmax_ms, plan.epsilon_ms) {
        println!(
            "deadline: {t_max} ms at confidence {} (error margin {eps:.3} ms)",
            plan.confidence
        );
    }
    println!();
    print!("{}", plan.to_tsv());
    println!();
    let chosen = plan
        .rows
        .iter()
        .find(|r| r.scale_out == plan.chosen_scale_out)
        .expect("chosen row is in the table");
    println!(
        "chosen scale-out: {} ({:.3} ms predicted, cost {:.6})",
        chosen.scale_out, chosen.predicted_runtime_ms, chosen.cost
    );
    if plan.bottleneck_warning {
        println!(
            "warning: every usable scale-out is memory-bottlenecked for a \
             {} GB dataset; expect degraded runtimes",
            args.dataset_size_gb
        );
    }

    if let Some(out) = &args.predict.out {
        let mut tsv = model_metadata(&machine, &predictor, args.predict.seed);
        tsv.push_str(&format!("# confidence\t{}\n", plan.confidence));
        if let Some(eps) = plan.epsilon_ms {
            tsv.push_str(&format!("# epsilon_ms\t{eps:.6}\n"));
        }
        tsv.push_str(&format!("# chosen_scale_out\t{}\n", plan.chosen_scale_out));
        tsv.push_str(&format!("# bottleneck_warning\t{}\n", plan.bottleneck_warning));
        tsv.push_str(&plan.to_tsv());
        write_file(out, &tsv)?;
    }
    Ok(0)
}

pub fn record(args: &RecordArgs) -> Result<i32, CliError> {
    let schema = load_schema(&args.schema)?;
    let ctx = exprs::parse_ctx(&schema, &args.ctx).map_err(CliError::Input)?;
    let rec = RuntimeRecord {
        machine_type: args.machine.clone(),
        instance_count: args.count,
        context: ctx,
        gross_runtime_ms: args.runtime_ms,
    };
    // A one-record set runs the full schema validation.
    TrainingSet::new(schema.clone(), vec![rec.clone()]).map_err(|e| match e {
        runcast_core::dataset::DatasetError::MalformedRow { reason, .. } => {
            CliError::Input(format!("invalid record: {reason}"))
        }
        other => input(other),
    })?;
    let line = serialize_record(&rec);

    if args.data.exists() {
        let mut text = read_file(&args.data)?;
        parse_tsv(&text, &schema)
            .map_err(|e| CliError::Input(format!("{}: {e}", args.data.display())))?;
        if !text.ends_with('\n') {
            text.push('\n');
        }
        text.push_str(&line);
        text.push('\n');
        write_file(&args.data, &text)?;
    } else {
        write_file(&args.data, &format!("{}\n{line}\n", schema.header()))?;
    }
    println!("recorded: {line}");
    Ok(0)
}

pub fn validate(args: &ValidateArgs) -> Result<i32, CliError> {
    let schema = load_schema(&args.schema)?;
    let existing = load_data(&args.data, &schema)?;
    let contribution = load_data(&args.contribution, &schema)?;
    let (catalog, candidates) = build_catalog(args.manifest.as_ref())?;
    let cap = Cap { max_splits: Some(args.max_splits), time_budget_ms: args.time_budget_ms };
    let verdict = validate_contribution(
        &catalog,
        &candidates,
        &existing,
        contribution.records(),
        &cap,
        args.threshold,
        args.seed,
    )
    .map_err(input)?;

    println!("baseline mape: {:.6}", verdict.baseline_mape);
    println!("candidate mape: {:.6}", verdict.candidate_mape);
    println!("threshold: {}", verdict.threshold);
    println!("affected model: {}", verdict.affected_model);
    println!("verdict: {}", if verdict.accepted { "accepted" } else { "rejected" });

    if let Some(out) = &args.out {
        write_file(
            out,
            &format!(
                "accepted\tbaseline_mape\tcandidate_mape\tthreshold\taffected_model\n\
                 {}\t{:.6}\t{:.6}\t{}\t{}\n",
                verdict.accepted,
                verdict.baseline_mape,
                verdict.candidate_mape,
                verdict.threshold,
                verdict.affected_model
            ),
        )?;
    }
    Ok(if verdict.accepted { 0 } else { 1 })
}

pub fn evaluate(args: &EvaluateArgs) -> Result<i32, CliError> {
    let kinds: Vec<JobKind> = match &args.job {
        Some(raw) => raw
            .split(',')
            .map(|s| s.trim().parse().map_err(CliError::Input))
            .collect::<Result<_, _>>()?,
        None => JobKind::all().to_vec(),
    };
    let profiles: Vec<JobProfile> = kinds
        .into_iter()
        .map(|kind| {
            let mut profile = JobProfile::new(kind);
            profile.sigma_rel = args.sigma_rel;
            profile
        })
        .collect();
    let cap = Cap { max_splits: Some(args.max_splits), time_budget_ms: args.time_budget_ms };

    let report = match args.mode {
        EvalMode::Origin => experiment_origin(
            &profiles,
            &OriginConfig { n_records: args.n, reps: args.reps, cap, seed: args.seed },
        ),
        EvalMode::Availability => {
            let training_sizes = exprs::parse_range(&args.training_sizes)
                .map_err(CliError::Input)?
                .into_iter()
                .map(|v| v as usize)
                .collect();
            experiment_availability(
                &profiles,
                &AvailabilityConfig {
                    training_sizes,
                    n_test: args.n_test,
                    reps: args.reps,
                    cap,
                    seed: args.seed,
                },
            )
        }
    }
    .map_err(input)?;

    print!("{}", report.to_tsv());
    if let Some(out) = &args.out {
        write_file(out, &report.to_tsv())?;
    }
    if let Some(dir) = &args.plot_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
        let written = report
            .emit_plot_data(dir)
            .map_err(|e| CliError::Input(format!("cannot write plot data: {e}")))?;
        for path in written {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(0)
}

pub fn generate(args: &GenerateArgs) -> Result<i32, CliError> {
    let kind: JobKind = args.job.parse().map_err(CliError::Input)?;
    let mut profile = JobProfile::new(kind);
    profile.sigma_rel = args.sigma_rel;
    if args.single_run {
        profile.median_of_five = false;
    }
    let ts = profile.generate(args.n, args.seed).map_err(input)?;
    let tsv = serialize_tsv(&ts);
    match &args.out {
        Some(path) => {
            write_file(path, &tsv)?;
            println!("wrote {} records to {}", ts.len(), path.display());
        }
        None => print!("{tsv}"),
    }
    if let Some(schema_out) = &args.schema_out {
        write_file(schema_out, &profile.schema().serialize())?;
        eprintln!("wrote schema to {}", schema_out.display());
    }
    Ok(0)
}
