//! Least-squares gradient boosting over regression trees.

use crate::dataset::FeatureMatrix;
use crate::models::tree::{Table, Tree, TreeParams};
use crate::models::{ModelError, Regressor};

/// Boosting hyperparameters.
///
/// The defaults are fixed and shared by every gradient-boosted model in the
/// library; they are part of the reproducibility contract.
#[derive(Debug, Clone, PartialEq)]
pub struct GbmParams {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for GbmParams {
    fn default() -> Self {
        GbmParams {
            n_rounds: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_leaf: 1,
        }
    }
}

/// A fitted boosting ensemble: a base value plus scaled tree corrections.
#[derive(Debug, Clone)]
pub struct GbmModel {
    base: f64,
    learning_rate: f64,
    trees: Vec<Tree>,
}

impl GbmModel {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Mean squared training error after each round, starting with the
    /// base-value-only ensemble. Non-increasing by construction.
    pub fn training_curve(x: &FeatureMatrix, y: &[f64], params: &GbmParams) -> Result<Vec<f64>, ModelError> {
        let (_, curve) = fit_with_curve(x.rows_flat(), x.n_cols(), y, params)?;
        Ok(curve)
    }
}

impl Regressor for GbmModel {
    fn predict_row(&self, row: &[f64]) -> f64 {
        let corrections: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        self.base + self.learning_rate * corrections
    }
}

/// Fits least-squares gradient boosting.
///
/// Round zero predicts the target mean; each following round fits a
/// depth-limited tree to the current residuals and adds it scaled by the
/// learning rate. The procedure is deterministic: no subsampling, and all
/// split ties resolve by fixed rules.
pub fn fit_gbm(x: &FeatureMatrix, y: &[f64], params: &GbmParams) -> Result<GbmModel, ModelError> {
    let (model, _) = fit_with_curve(x.rows_flat(), x.n_cols(), y, params)?;
    Ok(model)
}

/// Flat-slice form of [`fit_gbm`] for internal submodel training.
pub(crate) fn fit_gbm_flat(
    values: &[f64],
    n_cols: usize,
    y: &[f64],
    params: &GbmParams,
) -> Result<GbmModel, ModelError> {
    let (model, _) = fit_with_curve(values, n_cols, y, params)?;
    Ok(model)
}

fn fit_with_curve(
    values: &[f64],
    n_cols: usize,
    y: &[f64],
    params: &GbmParams,
) -> Result<(GbmModel, Vec<f64>), ModelError> {
    let n = y.len();
    if n == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    let table = Table { values, n_cols };
    debug_assert_eq!(table.n_rows(), n);

    let base = y.iter().sum::<f64>() / n as f64;
    let mut predictions = vec![base; n];
    let mut residuals = vec![0.0; n];
    let indices: Vec<usize> = (0..n).collect();
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
    };

    let mse = |preds: &[f64]| {
        preds
            .iter()
            .zip(y)
            .map(|(p, t)| (t - p) * (t - p))
            .sum::<f64>()
            / n as f64
    };

    let mut curve = Vec::with_capacity(params.n_rounds + 1);
    curve.push(mse(&predictions));
    let mut trees = Vec::with_capacity(params.n_rounds);
    for _ in 0..params.n_rounds {
        for i in 0..n {
            residuals[i] = y[i] - predictions[i];
        }
        let tree = Tree::fit(table, &residuals, &indices, tree_params);
        for (i, pred) in predictions.iter_mut().enumerate() {
            *pred += params.learning_rate * tree.predict(table_row(values, n_cols, i));
        }
        trees.push(tree);
        curve.push(mse(&predictions));
    }

    Ok((
        GbmModel {
            base,
            learning_rate: params.learning_rate,
            trees,
        },
        curve,
    ))
}

fn table_row(values: &[f64], n_cols: usize, i: usize) -> &[f64] {
    &values[i * n_cols..(i + 1) * n_cols]
}
