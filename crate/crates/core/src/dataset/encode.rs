//! Feature encoding: records to numeric rows.
//!
//! Models consume flat `f64` rows. The encoder fixes the column layout from
//! a training set and then maps records into it:
//!
//! * column 0: the scale-out (instance count),
//! * one column per numeric context feature, in schema order,
//! * a one-hot block for the machine type (observed types, sorted),
//! * a one-hot block per categorical context feature (observed levels,
//!   sorted).
//!
//! Machine types or category levels unseen at fit time encode as an all-zero
//! block. Each encoder carries a fingerprint of its schema and layout;
//! fitted models remember it and refuse rows from a different encoding.

use super::{CtxValue, FeatureKind, JobSchema, RuntimeRecord, TrainingSet};

/// Index of the scale-out column in every encoded row.
pub const SCALE_OUT_COL: usize = 0;

/// Maps records of one schema into flat numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    schema: JobSchema,
    machine_types: Vec<String>,
    /// Sorted observed levels per categorical feature, in schema order.
    cat_levels: Vec<(usize, Vec<String>)>,
    /// Context indices of numeric features, in schema order.
    numeric_features: Vec<usize>,
    n_cols: usize,
    fingerprint: u64,
}

/// A dense row-major matrix of encoded records with column roles.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    size_col: Option<usize>,
    fingerprint: u64,
}

/// One encoded record, tagged with the encoder's fingerprint.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedRow {
    pub values: Vec<f64>,
    pub fingerprint: u64,
}

impl Encoder {
    /// Fixes the column layout from the observed values in a training set.
    pub fn fit(ts: &TrainingSet) -> Encoder {
        let schema = ts.schema().clone();
        let mut machine_types: Vec<String> = Vec::new();
        for rec in ts.records() {
            if !machine_types.contains(&rec.machine_type) {
                machine_types.push(rec.machine_type.clone());
            }
        }
        machine_types.sort();

        let mut cat_levels: Vec<(usize, Vec<String>)> = Vec::new();
        let mut numeric_features: Vec<usize> = Vec::new();
        for (i, feat) in schema.context_features().iter().enumerate() {
            match feat.kind {
                FeatureKind::Numeric => numeric_features.push(i),
                FeatureKind::Categorical => {
                    let mut levels: Vec<String> = Vec::new();
                    for rec in ts.records() {
                        if let CtxValue::Cat(s) = &rec.context[i] {
                            if !levels.contains(s) {
                                levels.push(s.clone());
                            }
                        }
                    }
                    levels.sort();
                    cat_levels.push((i, levels));
                }
            }
        }

        let n_cols = 1
            + numeric_features.len()
            + machine_types.len()
            + cat_levels.iter().map(|(_, l)| l.len()).sum::<usize>();
        let fingerprint = fingerprint(&schema, &machine_types, &cat_levels);
        Encoder {
            schema,
            machine_types,
            cat_levels,
            numeric_features,
            n_cols,
            fingerprint,
        }
    }

    pub fn schema(&self) -> &JobSchema {
        &self.schema
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Column index of the problem-size feature, when the schema declares
    /// one (a numeric feature in the first context position).
    pub fn size_col(&self) -> Option<usize> {
        match self.schema.context_features().first() {
            Some(f) if f.kind == FeatureKind::Numeric => Some(1),
            _ => None,
        }
    }

    /// Encodes a whole set into a matrix plus the runtime targets.
    pub fn encode_set(&self, ts: &TrainingSet) -> (FeatureMatrix, Vec<f64>) {
        let mut values = Vec::with_capacity(ts.len() * self.n_cols);
        let mut targets = Vec::with_capacity(ts.len());
        for rec in ts.records() {
            values.extend_from_slice(&self.encode_record(rec).values);
            targets.push(rec.gross_runtime_ms);
        }
        let matrix = FeatureMatrix {
            rows: ts.len(),
            cols: self.n_cols,
            values,
            size_col: self.size_col(),
            fingerprint: self.fingerprint,
        };
        (matrix, targets)
    }

    /// Encodes one record.
    ///
    /// The record must match the encoder's schema arity; sets built through
    /// [`TrainingSet::new`] or [`super::parse_tsv`] always do.
    pub fn encode_record(&self, rec: &RuntimeRecord) -> EncodedRow {
        debug_assert_eq!(rec.context.len(), self.schema.context_features().len());
        let mut values = Vec::with_capacity(self.n_cols);
        values.push(f64::from(rec.instance_count));
        for &i in &self.numeric_features {
            let v = rec.context[i].as_num().unwrap_or(f64::NAN);
            values.push(v);
        }
        for mt in &self.machine_types {
            values.push(if *mt == rec.machine_type { 1.0 } else { 0.0 });
        }
        for (i, levels) in &self.cat_levels {
            let observed = match &rec.context[*i] {
                CtxValue::Cat(s) => Some(s),
                CtxValue::Num(_) => None,
            };
            for level in levels {
                values.push(if observed == Some(level) { 1.0 } else { 0.0 });
            }
        }
        EncodedRow {
            values,
            fingerprint: self.fingerprint,
        }
    }

    /// Encodes a prediction query that has no measured runtime yet.
    pub fn encode_query(
        &self,
        machine_type: &str,
        instance_count: u32,
        context: &[CtxValue],
    ) -> EncodedRow {
        let rec = RuntimeRecord {
            machine_type: machine_type.to_string(),
            instance_count,
            context: context.to_vec(),
            gross_runtime_ms: 1.0,
        };
        self.encode_record(&rec)
    }
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[f64]> + Clone + '_ {
        // Indexing instead of chunking keeps zero-column matrices legal;
        // they come up when every feature has been projected away.
        (0..self.rows).map(move |i| self.row(i))
    }

    /// All values, row-major.
    pub fn rows_flat(&self) -> &[f64] {
        &self.values
    }

    /// Column index holding the scale-out.
    pub fn scale_out_col(&self) -> usize {
        SCALE_OUT_COL
    }

    /// Column index holding the problem size, when the schema declares one.
    pub fn size_col(&self) -> Option<usize> {
        self.size_col
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Builds a matrix directly from rows, for model-level tests and tools.
    ///
    /// `size_col` follows the same convention as encoded data: column 0 is
    /// the scale-out.
    pub fn from_rows(rows: Vec<Vec<f64>>, size_col: Option<usize>, fingerprint: u64) -> FeatureMatrix {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        FeatureMatrix {
            rows: n_rows,
            cols: n_cols,
            values: rows.into_iter().flatten().collect(),
            size_col,
            fingerprint,
        }
    }
}

fn fingerprint(schema: &JobSchema, machine_types: &[String], cat_levels: &[(usize, Vec<String>)]) -> u64 {
    let mut h = Fnv1a::new();
    h.write(schema.job_name().as_bytes());
    for feat in schema.context_features() {
        h.write(feat.name.as_bytes());
        h.write(match feat.kind {
            FeatureKind::Numeric => b"n",
            FeatureKind::Categorical => b"c",
        });
    }
    for mt in machine_types {
        h.write(b"m");
        h.write(mt.as_bytes());
    }
    for (i, levels) in cat_levels {
        h.write(&i.to_le_bytes());
        for level in levels {
            h.write(b"l");
            h.write(level.as_bytes());
        }
    }
    h.finish()
}

/// Minimal FNV-1a, so fingerprints are stable across builds and platforms.
struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
        // Separate fields so ("ab","c") and ("a","bc") hash differently.
        self.0 ^= 0xff;
        self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ContextFeature, TrainingSet};

    fn grep_schema() -> JobSchema {
        JobSchema::new(
            "grep",
            vec![
                ContextFeature { name: "data_size_gb".into(), kind: FeatureKind::Numeric },
                ContextFeature { name: "keyword".into(), kind: FeatureKind::Categorical },
            ],
        )
        .unwrap()
    }

    fn grep_set() -> TrainingSet {
        let records = vec![
            RuntimeRecord {
                machine_type: "m5.xlarge".into(),
                instance_count: 4,
                context: vec![CtxValue::Num(20.0), CtxValue::Cat("alpha".into())],
                gross_runtime_ms: 1000.0,
            },
            RuntimeRecord {
                machine_type: "c5.xlarge".into(),
                instance_count: 8,
                context: vec![CtxValue::Num(10.0), CtxValue::Cat("beta".into())],
                gross_runtime_ms: 900.0,
            },
        ];
        TrainingSet::new(grep_schema(), records).unwrap()
    }

    #[test]
    fn layout_has_scale_out_first_then_numeric_then_one_hot() {
        let ts = grep_set();
        let enc = Encoder::fit(&ts);
        // scale_out + data_size + 2 machine types + 2 keyword levels
        assert_eq!(enc.n_cols(), 6);
        assert_eq!(enc.size_col(), Some(1));
        let (x, y) = enc.encode_set(&ts);
        assert_eq!(x.n_rows(), 2);
        // machine types sorted: c5 before m5; keyword levels: alpha before beta
        assert_eq!(x.row(0), &[4.0, 20.0, 0.0, 1.0, 1.0, 0.0]);
        assert_eq!(x.row(1), &[8.0, 10.0, 1.0, 0.0, 0.0, 1.0]);
        assert_eq!(y, vec![1000.0, 900.0]);
    }

    #[test]
    fn unseen_levels_encode_as_zero_block() {
        let ts = grep_set();
        let enc = Encoder::fit(&ts);
        let row = enc.encode_query(
            "r5.xlarge",
            2,
            &[CtxValue::Num(15.0), CtxValue::Cat("gamma".into())],
        );
        assert_eq!(row.values, vec![2.0, 15.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn fingerprint_tracks_levels_and_schema() {
        let ts = grep_set();
        let enc = Encoder::fit(&ts);
        let same = Encoder::fit(&ts);
        assert_eq!(enc.fingerprint(), same.fingerprint());

        let smaller = ts.subset(&[0]);
        let other = Encoder::fit(&smaller);
        assert_ne!(enc.fingerprint(), other.fingerprint());
    }

    #[test]
    fn size_col_absent_without_leading_numeric_feature() {
        let schema = JobSchema::new(
            "oddjob",
            vec![ContextFeature { name: "mode".into(), kind: FeatureKind::Categorical }],
        )
        .unwrap();
        let ts = TrainingSet::new(
            schema,
            vec![RuntimeRecord {
                machine_type: "m5.xlarge".into(),
                instance_count: 2,
                context: vec![CtxValue::Cat("fast".into())],
                gross_runtime_ms: 10.0,
            }],
        )
        .unwrap();
        let enc = Encoder::fit(&ts);
        assert_eq!(enc.size_col(), None);
        let (x, _) = enc.encode_set(&ts);
        assert_eq!(x.size_col(), None);
    }
}
