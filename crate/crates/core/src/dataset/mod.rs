//! Runtime records, their TSV wire format, and context partitioning.
//!
//! A runtime record describes one completed job execution: the machine type,
//! the number of instances (the scale-out), the job's context features, and
//! the measured gross runtime in milliseconds. Records travel between peers
//! as TSV with a fixed column order:
//!
//! ```text
//! machine_type  instance_count  <context feature ...>  gross_runtime
//! ```
//!
//! Context features are job-specific and declared by a [`JobSchema`]. By
//! convention the first context feature is the dataset/problem size; the
//! runtime column is always last.

mod encode;

pub use encode::{EncodedRow, Encoder, FeatureMatrix};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Column names that every record carries and no schema may redeclare.
pub const RESERVED_COLUMNS: [&str; 3] = ["machine_type", "instance_count", "gross_runtime"];

/// What kind of values a context feature holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKind::Numeric => write!(f, "numeric"),
            FeatureKind::Categorical => write!(f, "categorical"),
        }
    }
}

/// One declared context feature: a name and a kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextFeature {
    pub name: String,
    pub kind: FeatureKind,
}

/// Declares the context features of a job type, in column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSchema {
    job_name: String,
    context_features: Vec<ContextFeature>,
}

/// A single context feature value.
#[derive(Debug, Clone, PartialEq)]
pub enum CtxValue {
    Num(f64),
    Cat(String),
}

impl CtxValue {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            CtxValue::Num(v) => Some(*v),
            CtxValue::Cat(_) => None,
        }
    }
}

impl fmt::Display for CtxValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtxValue::Num(v) => write!(f, "{v}"),
            CtxValue::Cat(s) => write!(f, "{s}"),
        }
    }
}

/// One completed job execution.
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeRecord {
    pub machine_type: String,
    pub instance_count: u32,
    pub context: Vec<CtxValue>,
    pub gross_runtime_ms: f64,
}

/// An immutable collection of runtime records under one schema.
///
/// All transforming operations return new sets; existing sets are never
/// mutated, so shared references stay valid across concurrent readers.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    schema: JobSchema,
    records: Vec<RuntimeRecord>,
}

/// Errors from parsing or constructing datasets.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("header does not match schema: expected {expected:?}, found {found:?}")]
    SchemaMismatch { expected: String, found: String },
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("invalid schema: {reason}")]
    InvalidSchema { reason: String },
    #[error("malformed schema file at line {line}: {reason}")]
    SchemaFile { line: usize, reason: String },
}

impl JobSchema {
    /// Creates a schema, validating feature names.
    ///
    /// Names must be non-empty, unique, free of tabs and line breaks, and
    /// must not collide with the reserved record columns.
    pub fn new(
        job_name: impl Into<String>,
        context_features: Vec<ContextFeature>,
    ) -> Result<Self, DatasetError> {
        let job_name = job_name.into();
        validate_name(&job_name, "job name")?;
        for (i, feat) in context_features.iter().enumerate() {
            validate_name(&feat.name, "feature name")?;
            if RESERVED_COLUMNS.contains(&feat.name.as_str()) {
                return Err(DatasetError::InvalidSchema {
                    reason: format!("feature name {:?} is reserved", feat.name),
                });
            }
            if context_features[..i].iter().any(|f| f.name == feat.name) {
                return Err(DatasetError::InvalidSchema {
                    reason: format!("duplicate feature name {:?}", feat.name),
                });
            }
        }
        Ok(JobSchema {
            job_name,
            context_features,
        })
    }

    pub fn job_name(&self) -> &str {
        &self.job_name
    }

    pub fn context_features(&self) -> &[ContextFeature] {
        &self.context_features
    }

    /// The expected TSV header line for this schema.
    pub fn header(&self) -> String {
        let mut cols = vec!["machine_type".to_string(), "instance_count".to_string()];
        cols.extend(self.context_features.iter().map(|f| f.name.clone()));
        cols.push("gross_runtime".to_string());
        cols.join("\t")
    }

    /// Parses the key-value schema document produced by [`JobSchema::serialize`].
    ///
    /// The format is line-oriented: a `job_name` line followed by one
    /// `context_feature` line per feature, in column order. Blank lines are
    /// ignored.
    ///
    /// ```text
    /// job_name<TAB>kmeans
    /// context_feature<TAB>data_size_gb<TAB>numeric
    /// context_feature<TAB>k<TAB>numeric
    /// ```
    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let mut job_name: Option<String> = None;
        let mut features = Vec::new();
        for (idx, raw_line) in text.split('\n').enumerate() {
            let line_no = idx + 1;
            let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields[0] {
                "job_name" => {
                    if fields.len() != 2 {
                        return Err(DatasetError::SchemaFile {
                            line: line_no,
                            reason: "job_name takes exactly one value".into(),
                        });
                    }
                    if job_name.is_some() {
                        return Err(DatasetError::SchemaFile {
                            line: line_no,
                            reason: "job_name declared twice".into(),
                        });
                    }
                    job_name = Some(fields[1].to_string());
                }
                "context_feature" => {
                    if fields.len() != 3 {
                        return Err(DatasetError::SchemaFile {
                            line: line_no,
                            reason: "context_feature takes a name and a kind".into(),
                        });
                    }
                    let kind = match fields[2] {
                        "numeric" => FeatureKind::Numeric,
                        "categorical" => FeatureKind::Categorical,
                        other => {
                            return Err(DatasetError::SchemaFile {
                                line: line_no,
                                reason: format!("unknown feature kind {other:?}"),
                            })
                        }
                    };
                    features.push(ContextFeature {
                        name: fields[1].to_string(),
                        kind,
                    });
                }
                other => {
                    return Err(DatasetError::SchemaFile {
                        line: line_no,
                        reason: format!("unknown directive {other:?}"),
                    })
                }
            }
        }
        let job_name = job_name.ok_or(DatasetError::SchemaFile {
            line: 1,
            reason: "missing job_name line".into(),
        })?;
        JobSchema::new(job_name, features)
    }

    /// Serializes the schema into the document format read by [`JobSchema::parse`].
    pub fn serialize(&self) -> String {
        let mut out = format!("job_name\t{}\n", self.job_name);
        for feat in &self.context_features {
            out.push_str(&format!("context_feature\t{}\t{}\n", feat.name, feat.kind));
        }
        out
    }
}

fn validate_name(name: &str, what: &str) -> Result<(), DatasetError> {
    if name.is_empty() {
        return Err(DatasetError::InvalidSchema {
            reason: format!("{what} must not be empty"),
        });
    }
    if name.contains('\t') || name.contains('\n') || name.contains('\r') {
        return Err(DatasetError::InvalidSchema {
            reason: format!("{what} {name:?} contains tab or line break"),
        });
    }
    Ok(())
}

impl TrainingSet {
    /// Wraps validated records under a schema.
    ///
    /// Every record must match the schema's context arity and kinds.
    pub fn new(schema: JobSchema, records: Vec<RuntimeRecord>) -> Result<Self, DatasetError> {
        for (i, rec) in records.iter().enumerate() {
            check_record(&schema, rec).map_err(|reason| DatasetError::MalformedRow {
                line: i + 1,
                reason,
            })?;
        }
        Ok(TrainingSet { schema, records })
    }

    pub fn schema(&self) -> &JobSchema {
        &self.schema
    }

    pub fn records(&self) -> &[RuntimeRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// A new set holding the records at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> TrainingSet {
        TrainingSet {
            schema: self.schema.clone(),
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }

    /// A new set with the record at `index` removed.
    pub fn without(&self, index: usize) -> TrainingSet {
        let mut records = Vec::with_capacity(self.records.len().saturating_sub(1));
        for (i, rec) in self.records.iter().enumerate() {
            if i != index {
                records.push(rec.clone());
            }
        }
        TrainingSet {
            schema: self.schema.clone(),
            records,
        }
    }

    /// A new set with `extra` records appended.
    ///
    /// The extra records are validated against the schema.
    pub fn with_extra(&self, extra: &[RuntimeRecord]) -> Result<TrainingSet, DatasetError> {
        let mut records = self.records.clone();
        records.extend_from_slice(extra);
        TrainingSet::new(self.schema.clone(), records)
    }

    /// Keeps only records executed on the given machine type.
    pub fn filter_machine_type(&self, machine_type: &str) -> TrainingSet {
        TrainingSet {
            schema: self.schema.clone(),
            records: self
                .records
                .iter()
                .filter(|r| r.machine_type == machine_type)
                .cloned()
                .collect(),
        }
    }

    /// Record counts per machine type.
    pub fn machine_type_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for rec in &self.records {
            *counts.entry(rec.machine_type.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// Groups record indices by context, ignoring scale-out and problem size.
    ///
    /// Two records fall into the same partition when they agree on every
    /// context feature except the first (the dataset/problem size by
    /// convention). Each partition plays the role of one collaborator's
    /// local dataset: same job parameters, varying input sizes and
    /// scale-outs. Partitions are returned in sorted key order, so the
    /// result is deterministic.
    pub fn local_partition_indices(&self) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<Vec<KeyPart>, Vec<usize>> = BTreeMap::new();
        for (i, rec) in self.records.iter().enumerate() {
            let key: Vec<KeyPart> = rec.context.iter().skip(1).map(KeyPart::from).collect();
            groups.entry(key).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Like [`TrainingSet::local_partition_indices`], but materializes each
    /// partition as its own set.
    pub fn local_partitions(&self) -> Vec<TrainingSet> {
        self.local_partition_indices()
            .iter()
            .map(|idx| self.subset(idx))
            .collect()
    }
}

/// An orderable stand-in for a context value, used as a grouping key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum KeyPart {
    Num(u64),
    Cat(String),
}

impl From<&CtxValue> for KeyPart {
    fn from(v: &CtxValue) -> Self {
        match v {
            CtxValue::Num(x) => KeyPart::Num(x.to_bits()),
            CtxValue::Cat(s) => KeyPart::Cat(s.clone()),
        }
    }
}

fn check_record(schema: &JobSchema, rec: &RuntimeRecord) -> Result<(), String> {
    if rec.machine_type.is_empty() {
        return Err("machine_type must not be empty".into());
    }
    if rec.instance_count == 0 {
        return Err("instance_count must be at least 1".into());
    }
    if rec.context.len() != schema.context_features.len() {
        return Err(format!(
            "expected {} context values, found {}",
            schema.context_features.len(),
            rec.context.len()
        ));
    }
    for (feat, val) in schema.context_features.iter().zip(&rec.context) {
        match (feat.kind, val) {
            (FeatureKind::Numeric, CtxValue::Num(v)) => {
                if !v.is_finite() {
                    return Err(format!("feature {:?} is not finite", feat.name));
                }
            }
            (FeatureKind::Categorical, CtxValue::Cat(s)) => {
                if s.is_empty() {
                    return Err(format!("feature {:?} is empty", feat.name));
                }
            }
            (kind, _) => {
                return Err(format!("feature {:?} has wrong kind, expected {kind}", feat.name));
            }
        }
    }
    if !(rec.gross_runtime_ms.is_finite() && rec.gross_runtime_ms > 0.0) {
        return Err("gross_runtime must be a positive real".into());
    }
    Ok(())
}

/// Parses TSV text into a training set under the given schema.
///
/// The first line must be the exact header for the schema. Every following
/// non-empty line is one record. Field errors (wrong arity, non-numeric
/// values, missing values, non-positive runtimes) are reported with the
/// 1-based line number.
pub fn parse_tsv(text: &str, schema: &JobSchema) -> Result<TrainingSet, DatasetError> {
    let mut lines = text.split('\n').enumerate();
    let header = loop {
        match lines.next() {
            Some((_, raw)) => {
                let line = raw.strip_suffix('\r').unwrap_or(raw);
                if !line.is_empty() {
                    break line;
                }
            }
            None => {
                return Err(DatasetError::SchemaMismatch {
                    expected: schema.header(),
                    found: String::new(),
                })
            }
        }
    };
    let expected = schema.header();
    if header != expected {
        return Err(DatasetError::SchemaMismatch {
            expected,
            found: header.to_string(),
        });
    }

    let n_ctx = schema.context_features.len();
    let mut records = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != n_ctx + 3 {
            return Err(DatasetError::MalformedRow {
                line: line_no,
                reason: format!("expected {} fields, found {}", n_ctx + 3, fields.len()),
            });
        }
        let malformed = |reason: String| DatasetError::MalformedRow {
            line: line_no,
            reason,
        };
        let machine_type = fields[0].to_string();
        let instance_count: u32 = fields[1]
            .parse()
            .map_err(|_| malformed(format!("instance_count {:?} is not a positive integer", fields[1])))?;
        let mut context = Vec::with_capacity(n_ctx);
        for (feat, field) in schema.context_features.iter().zip(&fields[2..2 + n_ctx]) {
            if field.is_empty() {
                return Err(malformed(format!("missing value for feature {:?}", feat.name)));
            }
            let value = match feat.kind {
                FeatureKind::Numeric => {
                    let v: f64 = field
                        .parse()
                        .map_err(|_| malformed(format!("feature {:?} value {field:?} is not numeric", feat.name)))?;
                    CtxValue::Num(v)
                }
                FeatureKind::Categorical => CtxValue::Cat(field.to_string()),
            };
            context.push(value);
        }
        let gross_runtime_ms: f64 = fields[n_ctx + 2]
            .parse()
            .map_err(|_| malformed(format!("gross_runtime {:?} is not numeric", fields[n_ctx + 2])))?;
        let rec = RuntimeRecord {
            machine_type,
            instance_count,
            context,
            gross_runtime_ms,
        };
        check_record(schema, &rec).map_err(malformed)?;
        records.push(rec);
    }
    Ok(TrainingSet { schema: schema.clone(), records })
}

/// Serializes a training set back into TSV, header first.
///
/// Numbers are written in their shortest round-tripping form, so
/// `parse_tsv(serialize_tsv(ts), schema) == ts` for every valid set.
pub fn serialize_tsv(ts: &TrainingSet) -> String {
    let mut out = ts.schema.header();
    out.push('\n');
    for rec in &ts.records {
        out.push_str(&serialize_record(rec));
        out.push('\n');
    }
    out
}

/// One TSV line for a record, without the trailing newline.
pub fn serialize_record(rec: &RuntimeRecord) -> String {
    let mut fields = vec![rec.machine_type.clone(), rec.instance_count.to_string()];
    fields.extend(rec.context.iter().map(|v| v.to_string()));
    fields.push(rec.gross_runtime_ms.to_string());
    fields.join("\t")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sort_schema() -> JobSchema {
        JobSchema::new(
            "sort",
            vec![ContextFeature {
                name: "data_size_gb".into(),
                kind: FeatureKind::Numeric,
            }],
        )
        .unwrap()
    }

    fn kmeans_schema() -> JobSchema {
        JobSchema::new(
            "kmeans",
            vec![
                ContextFeature { name: "data_size_gb".into(), kind: FeatureKind::Numeric },
                ContextFeature { name: "k".into(), kind: FeatureKind::Numeric },
                ContextFeature { name: "convergence".into(), kind: FeatureKind::Numeric },
            ],
        )
        .unwrap()
    }

    fn kmeans_record(size: f64, k: f64, conv: f64, s: u32, rt: f64) -> RuntimeRecord {
        RuntimeRecord {
            machine_type: "m5.xlarge".into(),
            instance_count: s,
            context: vec![CtxValue::Num(size), CtxValue::Num(k), CtxValue::Num(conv)],
            gross_runtime_ms: rt,
        }
    }

    #[test]
    fn parses_valid_rows() {
        let text = "machine_type\tinstance_count\tdata_size_gb\tgross_runtime\n\
                    m5.xlarge\t4\t20\t128000\n\
                    m5.xlarge\t8\t20\t74000\n";
        let ts = parse_tsv(text, &sort_schema()).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts.records()[0].instance_count, 4);
        assert_eq!(ts.records()[0].context, vec![CtxValue::Num(20.0)]);
        assert_eq!(ts.records()[1].gross_runtime_ms, 74000.0);
    }

    #[test]
    fn rejects_non_numeric_with_line_number() {
        let text = "machine_type\tinstance_count\tdata_size_gb\tgross_runtime\n\
                    m5.xlarge\t4\t20\t128000\n\
                    m5.xlarge\tfour\t20\t128000\n";
        let err = parse_tsv(text, &sort_schema()).unwrap_err();
        match err {
            DatasetError::MalformedRow { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_values() {
        let text = "machine_type\tinstance_count\tdata_size_gb\tgross_runtime\n\
                    m5.xlarge\t4\t\t128000\n";
        let err = parse_tsv(text, &sort_schema()).unwrap_err();
        assert!(matches!(err, DatasetError::MalformedRow { line: 2, .. }));
    }

    #[test]
    fn rejects_zero_and_negative_runtime() {
        for bad in ["0", "-5"] {
            let text = format!(
                "machine_type\tinstance_count\tdata_size_gb\tgross_runtime\nm5.xlarge\t4\t20\t{bad}\n"
            );
            let err = parse_tsv(&text, &sort_schema()).unwrap_err();
            assert!(matches!(err, DatasetError::MalformedRow { line: 2, .. }));
        }
    }

    #[test]
    fn rejects_wrong_header() {
        let text = "machine_type\tinstance_count\tsize\tgross_runtime\n";
        let err = parse_tsv(text, &sort_schema()).unwrap_err();
        assert!(matches!(err, DatasetError::SchemaMismatch { .. }));
    }

    #[test]
    fn rejects_arity_mismatch() {
        let text = "machine_type\tinstance_count\tdata_size_gb\tgross_runtime\n\
                    m5.xlarge\t4\t20\t1\t128000\n";
        let err = parse_tsv(text, &sort_schema()).unwrap_err();
        assert!(matches!(err, DatasetError::MalformedRow { line: 2, .. }));
    }

    #[test]
    fn round_trips_byte_exactly() {
        let text = "machine_type\tinstance_count\tdata_size_gb\tgross_runtime\n\
                    m5.xlarge\t4\t20\t128000\n\
                    c5.xlarge\t8\t12.5\t74000.25\n";
        let schema = sort_schema();
        let ts = parse_tsv(text, &schema).unwrap();
        let out = serialize_tsv(&ts);
        assert_eq!(out, text);
        let back = parse_tsv(&out, &schema).unwrap();
        assert_eq!(back, ts);
    }

    #[test]
    fn schema_document_round_trips() {
        let schema = JobSchema::new(
            "grep",
            vec![
                ContextFeature { name: "data_size_gb".into(), kind: FeatureKind::Numeric },
                ContextFeature { name: "keyword".into(), kind: FeatureKind::Categorical },
            ],
        )
        .unwrap();
        let doc = schema.serialize();
        let back = JobSchema::parse(&doc).unwrap();
        assert_eq!(back, schema);
    }

    #[test]
    fn schema_rejects_reserved_and_duplicate_names() {
        let reserved = JobSchema::new(
            "j",
            vec![ContextFeature { name: "instance_count".into(), kind: FeatureKind::Numeric }],
        );
        assert!(matches!(reserved, Err(DatasetError::InvalidSchema { .. })));
        let dup = JobSchema::new(
            "j",
            vec![
                ContextFeature { name: "a".into(), kind: FeatureKind::Numeric },
                ContextFeature { name: "a".into(), kind: FeatureKind::Numeric },
            ],
        );
        assert!(matches!(dup, Err(DatasetError::InvalidSchema { .. })));
    }

    #[test]
    fn filter_machine_type_keeps_matching_records() {
        let schema = sort_schema();
        let text = "machine_type\tinstance_count\tdata_size_gb\tgross_runtime\n\
                    m5.xlarge\t4\t20\t128000\n\
                    c5.xlarge\t8\t20\t74000\n\
                    m5.xlarge\t2\t10\t99000\n";
        let ts = parse_tsv(text, &schema).unwrap();
        let filtered = ts.filter_machine_type("m5.xlarge");
        assert_eq!(filtered.len(), 2);
        assert!(filtered.records().iter().all(|r| r.machine_type == "m5.xlarge"));
        assert_eq!(ts.len(), 3);
    }

    #[test]
    fn local_partitions_group_by_non_size_context() {
        let schema = kmeans_schema();
        let records = vec![
            kmeans_record(10.0, 3.0, 0.001, 2, 50_000.0),
            kmeans_record(20.0, 9.0, 0.001, 4, 90_000.0),
            kmeans_record(15.0, 3.0, 0.001, 8, 30_000.0),
            kmeans_record(10.0, 9.0, 0.001, 2, 80_000.0),
        ];
        let ts = TrainingSet::new(schema, records).unwrap();
        let parts = ts.local_partitions();
        assert_eq!(parts.len(), 2);
        let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
        assert_eq!(sizes, vec![2, 2]);
        for part in &parts {
            let k0 = part.records()[0].context[1].clone();
            assert!(part.records().iter().all(|r| r.context[1] == k0));
        }
    }

    #[test]
    fn single_partition_when_only_size_varies() {
        let schema = sort_schema();
        let text = "machine_type\tinstance_count\tdata_size_gb\tgross_runtime\n\
                    m5.xlarge\t4\t20\t128000\n\
                    m5.xlarge\t8\t10\t34000\n";
        let ts = parse_tsv(text, &schema).unwrap();
        assert_eq!(ts.local_partitions().len(), 1);
    }

    #[test]
    fn partitions_cover_all_records_exactly_once() {
        let schema = kmeans_schema();
        let records: Vec<RuntimeRecord> = (0..12)
            .map(|i| kmeans_record(10.0 + i as f64, (3 + i % 4) as f64, 0.001, 2 + (i % 3) as u32, 1000.0 + i as f64))
            .collect();
        let ts = TrainingSet::new(schema, records).unwrap();
        let mut seen: Vec<usize> = ts.local_partition_indices().into_iter().flatten().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn machine_type_counts_are_sorted_and_complete() {
        let schema = sort_schema();
        let text = "machine_type\tinstance_count\tdata_size_gb\tgross_runtime\n\
                    m5.xlarge\t4\t20\t128000\n\
                    c5.xlarge\t8\t20\t74000\n\
                    m5.xlarge\t2\t10\t99000\n";
        let ts = parse_tsv(text, &schema).unwrap();
        let counts = ts.machine_type_counts();
        assert_eq!(counts.get("m5.xlarge"), Some(&2));
        assert_eq!(counts.get("c5.xlarge"), Some(&1));
        assert_eq!(counts.len(), 2);
    }
}
