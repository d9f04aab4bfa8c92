//! Ordinary least squares with an intercept.

use nalgebra::{DMatrix, DVector};

use crate::dataset::FeatureMatrix;
use crate::models::{ModelError, Regressor};

/// A fitted linear regression `y = intercept + slopes . x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    intercept: f64,
    slopes: Vec<f64>,
}

impl LinearModel {
    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }
}

impl Regressor for LinearModel {
    fn predict_row(&self, row: &[f64]) -> f64 {
        debug_assert_eq!(row.len(), self.slopes.len());
        self.intercept
            + self
                .slopes
                .iter()
                .zip(row)
                .map(|(b, x)| b * x)
                .sum::<f64>()
    }
}

/// Fits ordinary least squares with an intercept.
///
/// Columns and target are centered, the slopes solve the centered system,
/// and the intercept recovers the means. On singular systems the slopes are
/// the minimum-norm solution, so degenerate inputs (constant columns, fewer
/// rows than columns, a single point) still fit: a single point yields the
/// intercept-only model.
pub fn fit_linear(x: &FeatureMatrix, y: &[f64]) -> Result<LinearModel, ModelError> {
    fit_linear_rows(x.rows_iter(), x.n_cols(), y)
}

/// Row-iterator form of [`fit_linear`], for callers holding reduced rows.
pub(crate) fn fit_linear_rows<'a>(
    rows: impl Iterator<Item = &'a [f64]> + Clone,
    n_cols: usize,
    y: &[f64],
) -> Result<LinearModel, ModelError> {
    let n = y.len();
    if n == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }

    let mut col_means = vec![0.0; n_cols];
    for row in rows.clone() {
        debug_assert_eq!(row.len(), n_cols);
        for (m, v) in col_means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut col_means {
        *m /= n as f64;
    }
    let y_mean = y.iter().sum::<f64>() / n as f64;

    let mut centered = Vec::with_capacity(n * n_cols);
    for row in rows {
        for (v, m) in row.iter().zip(&col_means) {
            centered.push(v - m);
        }
    }
    let a = DMatrix::from_row_slice(n, n_cols, &centered);
    let b = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
    let slopes = min_norm_lstsq(&a, &b);

    let intercept = y_mean
        - slopes
            .iter()
            .zip(&col_means)
            .map(|(b, m)| b * m)
            .sum::<f64>();
    Ok(LinearModel {
        intercept,
        slopes: slopes.iter().copied().collect(),
    })
}

/// Minimum-norm least-squares solution of `a x = b` via SVD.
///
/// Singular values below `max(m, n) * eps * sigma_max` are treated as zero,
/// which makes rank-deficient systems well-defined and deterministic.
pub(crate) fn min_norm_lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n_cols = a.ncols();
    if n_cols == 0 {
        return DVector::zeros(0);
    }
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if sigma_max <= 0.0 || sigma_max.is_nan() {
        return DVector::zeros(n_cols);
    }
    let cutoff = sigma_max * a.nrows().max(n_cols) as f64 * f64::EPSILON;
    svd.solve(b, cutoff)
        .map(|m| DVector::from_column_slice(m.as_slice()))
        .unwrap_or_else(|_| DVector::zeros(n_cols))
}
