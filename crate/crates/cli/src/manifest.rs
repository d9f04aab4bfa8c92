//! The model plug-in manifest.
//!
//! A manifest line names a model variant and the family it is built from,
//! with optional parameter overrides:
//!
//! ```text
//! # model_id<TAB>family<TAB>key=value,key=value
//! fast-gbm<TAB>gbm<TAB>n_rounds=40,learning_rate=0.2
//! shallow-ogb<TAB>ogb<TAB>max_depth=2
//! ```
//!
//! Families: `gbm`, `bom`, `ogb`, `ernest`. Parameters apply to the
//! boosted families only: `n_rounds`, `learning_rate`, `max_depth`,
//! `min_leaf`.

use runcast_core::models::{
    AliasFactory, BomFactory, ErnestFactory, GbmFactory, GbmParams, ModelFactory, ModelId,
    OgbFactory,
};

pub fn parse_manifest(text: &str) -> Result<Vec<AliasFactory>, String> {
    let mut factories = Vec::new();
    let mut seen_ids: Vec<String> = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: String| format!("manifest line {line_no}: {reason}");
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(bad(format!(
                "expected \"id<TAB>family[<TAB>params]\", found {} fields",
                fields.len()
            )));
        }
        let id: ModelId = fields[0].parse().map_err(|e| bad(format!("{e}")))?;
        if !matches!(id, ModelId::Custom(_)) {
            return Err(bad(format!("id {:?} shadows a built-in model", fields[0])));
        }
        if seen_ids.iter().any(|s| s == fields[0]) {
            return Err(bad(format!("id {:?} appears twice", fields[0])));
        }
        seen_ids.push(fields[0].to_string());

        let family = fields[1];
        let params_field = fields.get(2).copied().unwrap_or("");
        let inner: Box<dyn ModelFactory> = match family {
            "gbm" => Box::new(GbmFactory { params: parse_params(params_field).map_err(&bad)? }),
            "ogb" => Box::new(OgbFactory { params: parse_params(params_field).map_err(&bad)? }),
            "bom" | "ernest" => {
                if !params_field.is_empty() {
                    return Err(bad(format!("family {family:?} takes no parameters")));
                }
                if family == "bom" {
                    Box::new(BomFactory)
                } else {
                    Box::new(ErnestFactory)
                }
            }
            other => {
                return Err(bad(format!(
                    "unknown family {other:?}; expected gbm, bom, ogb, or ernest"
                )))
            }
        };
        factories.push(AliasFactory::new(id, inner));
    }
    Ok(factories)
}

fn parse_params(field: &str) -> Result<GbmParams, String> {
    let mut params = GbmParams::default();
    if field.is_empty() {
        return Ok(params);
    }
    for pair in field.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("parameter {pair:?} is not key=value"))?;
        let key = key.trim();
        let value = value.trim();
        let numeric = |what: &str| format!("parameter {key} expects {what}, got {value:?}");
        match key {
            "n_rounds" => params.n_rounds = value.parse().map_err(|_| numeric("an integer"))?,
            "learning_rate" => {
                params.learning_rate = value.parse().map_err(|_| numeric("a number"))?
            }
            "max_depth" => params.max_depth = value.parse().map_err(|_| numeric("an integer"))?,
            "min_leaf" => params.min_leaf = value.parse().map_err(|_| numeric("an integer"))?,
            other => return Err(format!("unknown parameter {other:?}")),
        }
    }
    if !(params.learning_rate.is_finite() && params.learning_rate > 0.0) {
        return Err("learning_rate must be positive".into());
    }
    if params.n_rounds == 0 || params.min_leaf == 0 {
        return Err("n_rounds and min_leaf must be at least 1".into());
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_full_manifest_parses() {
        let text = "# variants\n\
                    fast-gbm\tgbm\tn_rounds=40,learning_rate=0.2\n\
                    plain-ernest\ternest\n\
                    shallow-ogb\togb\tmax_depth=2\n";
        let factories = parse_manifest(text).unwrap();
        let ids: Vec<ModelId> = factories.iter().map(|f| f.id()).collect();
        assert_eq!(
            ids,
            vec![
                ModelId::Custom("fast-gbm".into()),
                ModelId::Custom("plain-ernest".into()),
                ModelId::Custom("shallow-ogb".into()),
            ]
        );
    }

    #[test]
    fn bad_lines_are_rejected_with_line_numbers() {
        for (text, needle) in [
            ("gbm\tgbm\n", "shadows a built-in"),
            ("x\tgbm\tn_rounds=zero\n", "an integer"),
            ("x\tsvm\n", "unknown family"),
            ("x\ternest\tn_rounds=3\n", "takes no parameters"),
            ("x\tgbm\tdepth=3\n", "unknown parameter"),
            ("x\n", "expected"),
            ("a\tgbm\na\tbom\n", "appears twice"),
            ("x\tgbm\tlearning_rate=0\n", "positive"),
        ] {
            let err = parse_manifest(text).unwrap_err();
            assert!(err.contains(needle), "{text:?} -> {err}");
            assert!(err.contains("manifest line"), "{err}");
        }
    }
}
