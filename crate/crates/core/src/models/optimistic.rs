//! Optimistic decomposition of runtime into inputs and scale-out behavior.
//!
//! The decomposition assumes runtime factors multiplicatively into a
//! context-dependent part and a scale-out-dependent part. Training has
//! three steps:
//!
//! 1. Scale-out submodel (SSM): records are grouped by every feature except
//!    the scale-out; each group with at least two distinct scale-outs is
//!    normalized by its own runtime at its smallest scale-out, and the
//!    pooled `(scale_out, relative runtime)` pairs are fitted by either a
//!    cubic polynomial or gradient boosting. The fitted curve is exposed as
//!    `ssm_factor(s)` normalized so that `ssm_factor(1) == 1` exactly.
//! 2. Projection: every record's runtime is divided by `ssm_factor(s)`,
//!    giving its estimated runtime at scale-out 1.
//! 3. Inputs submodel (IBM): a regression from the non-scale-out features
//!    to the projected runtimes.
//!
//! A prediction is the IBM value multiplied by the SSM factor at the
//! requested scale-out.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::dataset::FeatureMatrix;
use crate::models::gbm::{fit_gbm_flat, GbmModel, GbmParams};
use crate::models::linear::{fit_linear_rows, min_norm_lstsq, LinearModel};
use crate::models::{ModelError, Regressor};

/// Smallest scale-out factor ever returned; keeps projections positive.
const MIN_SSM_FACTOR: f64 = 1e-6;

/// Which regression the inputs submodel uses.
#[derive(Debug, Clone)]
pub enum IbmKind {
    Linear,
    Gbm(GbmParams),
}

/// Which regression the scale-out submodel uses.
#[derive(Debug, Clone)]
pub enum SsmKind {
    Poly3,
    Gbm(GbmParams),
}

/// A fitted polynomial scale-out curve.
#[derive(Debug, Clone)]
pub struct SsmCurve {
    /// Coefficients, lowest power first.
    coeffs: Vec<f64>,
    at_one: f64,
}

impl SsmCurve {
    fn eval(&self, s: f64) -> f64 {
        // Horner, highest power first.
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    /// Degree of the fitted polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Relative runtime at scale-out `s`, normalized to 1 at `s = 1`.
    pub fn ssm_factor(&self, s: f64) -> f64 {
        if !(self.at_one.is_finite() && self.at_one != 0.0) {
            return 1.0;
        }
        (self.eval(s) / self.at_one).max(MIN_SSM_FACTOR)
    }
}

/// Fits the polynomial scale-out submodel on one group of measurements.
///
/// The runtimes are normalized by the mean runtime at the smallest
/// scale-out present, then fitted by least squares with degree
/// `min(3, distinct scale-outs - 1)`.
pub fn fit_poly3_ssm(scale_outs: &[u32], runtimes: &[f64]) -> Result<SsmCurve, ModelError> {
    assert_eq!(scale_outs.len(), runtimes.len(), "scale_outs and runtimes must pair up");
    if scale_outs.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    let mut distinct: Vec<u32> = scale_outs.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(ModelError::InsufficientScaleOutVariation);
    }
    let s_min = distinct[0];
    let at_min: Vec<f64> = scale_outs
        .iter()
        .zip(runtimes)
        .filter(|(s, _)| **s == s_min)
        .map(|(_, r)| *r)
        .collect();
    let r_ref = at_min.iter().sum::<f64>() / at_min.len() as f64;
    let pairs: Vec<(f64, f64)> = scale_outs
        .iter()
        .zip(runtimes)
        .map(|(s, r)| (f64::from(*s), r / r_ref))
        .collect();
    fit_poly_pairs(&pairs).ok_or(ModelError::InsufficientScaleOutVariation)
}

fn fit_poly_pairs(pairs: &[(f64, f64)]) -> Option<SsmCurve> {
    let mut distinct: Vec<u64> = pairs.iter().map(|(s, _)| s.to_bits()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return None;
    }
    let degree = (distinct.len() - 1).min(3);
    let n = pairs.len();
    let mut vander = Vec::with_capacity(n * (degree + 1));
    for (s, _) in pairs {
        let mut power = 1.0;
        for _ in 0..=degree {
            vander.push(power);
            power *= s;
        }
    }
    let a = DMatrix::from_row_slice(n, degree + 1, &vander);
    let b = DVector::from_iterator(n, pairs.iter().map(|(_, r)| *r));
    let coeffs: Vec<f64> = min_norm_lstsq(&a, &b).iter().copied().collect();
    let curve = SsmCurve { coeffs, at_one: 0.0 };
    let at_one = curve.eval(1.0);
    if !at_one.is_finite() {
        return None;
    }
    Some(SsmCurve { at_one, ..curve })
}

#[derive(Debug, Clone)]
enum Ssm {
    Poly(SsmCurve),
    Boosted { model: GbmModel, at_one: f64 },
}

impl Ssm {
    fn factor(&self, s: f64) -> f64 {
        match self {
            Ssm::Poly(curve) => curve.ssm_factor(s),
            Ssm::Boosted { model, at_one } => {
                if !(at_one.is_finite() && *at_one != 0.0) {
                    return 1.0;
                }
                (model.predict_row(&[s]) / at_one).max(MIN_SSM_FACTOR)
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Ibm {
    Linear(LinearModel),
    Boosted(GbmModel),
}

impl Ibm {
    fn predict(&self, reduced_row: &[f64]) -> f64 {
        match self {
            Ibm::Linear(m) => m.predict_row(reduced_row),
            Ibm::Boosted(m) => m.predict_row(reduced_row),
        }
    }
}

/// The fitted decomposition.
#[derive(Debug, Clone)]
pub struct OptimisticModel {
    ssm: Option<Ssm>,
    ibm: Ibm,
    scale_out_col: usize,
    n_cols: usize,
}

impl OptimisticModel {
    /// Relative runtime at scale-out `s`; exactly 1 at `s = 1`.
    pub fn ssm_factor(&self, s: f64) -> f64 {
        match &self.ssm {
            Some(ssm) => ssm.factor(s),
            None => 1.0,
        }
    }

    /// The inputs submodel's projected runtime at scale-out 1 for a full
    /// encoded row (the scale-out column is ignored).
    pub fn ibm_predict(&self, row: &[f64]) -> f64 {
        self.ibm.predict(&reduce_row(row, self.scale_out_col))
    }
}

impl Regressor for OptimisticModel {
    fn predict_row(&self, row: &[f64]) -> f64 {
        debug_assert_eq!(row.len(), self.n_cols);
        self.ibm_predict(row) * self.ssm_factor(row[self.scale_out_col])
    }
}

/// Fits the optimistic decomposition on encoded training data.
///
/// With the polynomial SSM, at least one group of records must share every
/// non-scale-out feature across two or more distinct scale-outs; otherwise
/// [`ModelError::InsufficientScaleOutVariation`] is returned. The boosted
/// SSM degrades to a constant factor of 1 instead, reducing the model to
/// its inputs submodel.
pub fn fit_optimistic(
    x: &FeatureMatrix,
    y: &[f64],
    ibm_kind: IbmKind,
    ssm_kind: SsmKind,
) -> Result<OptimisticModel, ModelError> {
    let n = y.len();
    if n == 0 || x.n_rows() == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    debug_assert_eq!(x.n_rows(), n);
    let scale_out_col = x.scale_out_col();

    let pairs = pooled_normalized_pairs(x, y, scale_out_col);
    let ssm = match ssm_kind {
        SsmKind::Poly3 => {
            if pairs.is_empty() {
                return Err(ModelError::InsufficientScaleOutVariation);
            }
            fit_poly_pairs(&pairs).map(Ssm::Poly)
        }
        SsmKind::Gbm(ref params) => {
            if pairs.is_empty() {
                None
            } else {
                let values: Vec<f64> = pairs.iter().map(|(s, _)| *s).collect();
                let targets: Vec<f64> = pairs.iter().map(|(_, r)| *r).collect();
                let model = fit_gbm_flat(&values, 1, &targets, params)?;
                let at_one = model.predict_row(&[1.0]);
                if at_one.is_finite() && at_one != 0.0 {
                    Some(Ssm::Boosted { model, at_one })
                } else {
                    None
                }
            }
        }
    };

    let factor_of = |s: f64| ssm.as_ref().map_or(1.0, |m| m.factor(s));
    let projected: Vec<f64> = x
        .rows_iter()
        .zip(y)
        .map(|(row, r)| r / factor_of(row[scale_out_col]))
        .collect();

    let reduced_cols = x.n_cols() - 1;
    let mut reduced = Vec::with_capacity(n * reduced_cols);
    for row in x.rows_iter() {
        reduced.extend_from_slice(&reduce_row(row, scale_out_col));
    }
    let ibm = if reduced_cols == 0 {
        // No context features at all: the IBM is the projected mean.
        Ibm::Linear(fit_linear_rows(
            std::iter::repeat_n(&[][..], n),
            0,
            &projected,
        )?)
    } else {
        match ibm_kind {
            IbmKind::Linear => Ibm::Linear(fit_linear_rows(
                reduced.chunks_exact(reduced_cols),
                reduced_cols,
                &projected,
            )?),
            IbmKind::Gbm(ref params) => {
                Ibm::Boosted(fit_gbm_flat(&reduced, reduced_cols, &projected, params)?)
            }
        }
    };

    Ok(OptimisticModel {
        ssm,
        ibm,
        scale_out_col,
        n_cols: x.n_cols(),
    })
}

/// Groups rows by every column except the scale-out, normalizes each group
/// with two or more distinct scale-outs by its runtime at the smallest one,
/// and pools the normalized pairs.
fn pooled_normalized_pairs(x: &FeatureMatrix, y: &[f64], scale_out_col: usize) -> Vec<(f64, f64)> {
    let mut groups: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
    for (i, row) in x.rows_iter().enumerate() {
        let key: Vec<u64> = row
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != scale_out_col)
            .map(|(_, v)| v.to_bits())
            .collect();
        groups.entry(key).or_default().push(i);
    }

    let mut pairs = Vec::new();
    for members in groups.values() {
        let s_of = |i: usize| x.row(i)[scale_out_col];
        let mut distinct: Vec<u64> = members.iter().map(|&i| s_of(i).to_bits()).collect();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 2 {
            continue;
        }
        let s_min = members.iter().map(|&i| s_of(i)).fold(f64::INFINITY, f64::min);
        let at_min: Vec<f64> = members
            .iter()
            .filter(|&&i| s_of(i) == s_min)
            .map(|&i| y[i])
            .collect();
        let r_ref = at_min.iter().sum::<f64>() / at_min.len() as f64;
        debug_assert!(r_ref > 0.0, "runtimes must be positive");
        for &i in members {
            pairs.push((s_of(i), y[i] / r_ref));
        }
    }
    pairs
}

fn reduce_row(row: &[f64], scale_out_col: usize) -> Vec<f64> {
    row.iter()
        .enumerate()
        .filter(|(c, _)| *c != scale_out_col)
        .map(|(_, v)| *v)
        .collect()
}
