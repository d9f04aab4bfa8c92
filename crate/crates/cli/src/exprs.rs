//! Parsers for the small command-line expressions.

use runcast_core::dataset::{CtxValue, FeatureKind, JobSchema};

/// Parses a range expression: `"a..b"`, `"a..b,step"`, or a bare value.
/// The range is inclusive on both ends.
pub fn parse_range(expr: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("cannot parse range {expr:?}; expected \"a..b\", \"a..b,step\", or a single value");
    let (range, step) = match expr.split_once(',') {
        Some((range, step)) => {
            let step: u64 = step.trim().parse().map_err(|_| bad())?;
            if step == 0 {
                return Err(format!("range {expr:?} has step 0"));
            }
            (range, step)
        }
        None => (expr, 1),
    };
    let range = range.trim();
    let (lo, hi) = match range.split_once("..") {
        Some((lo, hi)) => {
            let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
            (lo, hi)
        }
        None => {
            let v: u64 = range.parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("range {expr:?} is empty ({lo} > {hi})"));
    }
    Ok((lo..=hi).step_by(step as usize).collect())
}

/// Scale-out domain: a range of positive values.
pub fn parse_scale_outs(expr: &str) -> Result<Vec<u32>, String> {
    let values = parse_range(expr)?;
    values
        .into_iter()
        .map(|v| {
            if v == 0 {
                Err("scale-outs must be at least 1".to_string())
            } else {
                u32::try_from(v).map_err(|_| format!("scale-out {v} is out of range"))
            }
        })
        .collect()
}

/// Parses comma-separated context feature values in schema order.
pub fn parse_ctx(schema: &JobSchema, raw: &str) -> Result<Vec<CtxValue>, String> {
    let features = schema.context_features();
    let fields: Vec<&str> = if raw.is_empty() { Vec::new() } else { raw.split(',').collect() };
    if fields.len() != features.len() {
        return Err(format!(
            "--ctx needs {} comma-separated values ({}), found {}",
            features.len(),
            features.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join(", "),
            fields.len()
        ));
    }
    features
        .iter()
        .zip(fields)
        .map(|(feature, field)| {
            let field = field.trim();
            match feature.kind {
                FeatureKind::Numeric => field
                    .parse()
                    .map(CtxValue::Num)
                    .map_err(|_| format!("feature {} expects a number, got {field:?}", feature.name)),
                FeatureKind::Categorical => {
                    if field.is_empty() {
                        Err(format!("feature {} has an empty value", feature.name))
                    } else {
                        Ok(CtxValue::Cat(field.to_string()))
                    }
                }
            }
        })
        .collect()
}
