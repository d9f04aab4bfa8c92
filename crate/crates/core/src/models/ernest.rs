//! The parametric scale-out baseline.
//!
//! Runtime is modeled as a non-negative combination of a fixed feature map
//! of problem size and scale-out:
//!
//! ```text
//! t(size, s) = theta . [1, size/s, ln s, s]
//! ```
//!
//! The four terms stand for fixed overhead, perfectly parallel work,
//! aggregation-tree depth, and per-machine coordination cost. Coefficients
//! are fitted with non-negative least squares; everything else about the
//! job's context is deliberately ignored, which is exactly what makes this
//! model a baseline.

use nalgebra::{DMatrix, DVector};

use crate::dataset::FeatureMatrix;
use crate::models::linear::min_norm_lstsq;
use crate::models::{ModelError, Regressor};

/// A fitted baseline model.
#[derive(Debug, Clone, PartialEq)]
pub struct ErnestModel {
    theta: [f64; 4],
    scale_out_col: usize,
    size_col: usize,
}

impl ErnestModel {
    /// The fitted non-negative coefficients.
    pub fn theta(&self) -> [f64; 4] {
        self.theta
    }
}

fn feature_map(size: f64, s: f64) -> [f64; 4] {
    [1.0, size / s, s.ln(), s]
}

impl Regressor for ErnestModel {
    fn predict_row(&self, row: &[f64]) -> f64 {
        let s = row[self.scale_out_col].max(1.0);
        let size = row[self.size_col];
        feature_map(size, s)
            .iter()
            .zip(&self.theta)
            .map(|(f, t)| f * t)
            .sum()
    }
}

/// Fits the baseline with non-negative least squares.
///
/// Requires the schema convention of a leading numeric problem-size
/// feature; rows with other context features are accepted but those
/// features are ignored.
pub fn fit_ernest(x: &FeatureMatrix, y: &[f64]) -> Result<ErnestModel, ModelError> {
    if y.is_empty() || x.n_rows() == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    let size_col = x.size_col().ok_or(ModelError::MissingSizeFeature)?;
    let scale_out_col = x.scale_out_col();

    let n = x.n_rows();
    let mut design = Vec::with_capacity(n * 4);
    for row in x.rows_iter() {
        let s = row[scale_out_col].max(1.0);
        design.extend_from_slice(&feature_map(row[size_col], s));
    }
    let a = DMatrix::from_row_slice(n, 4, &design);
    let b = DVector::from_column_slice(y);
    let theta = nnls(&a, &b);
    Ok(ErnestModel {
        theta: [theta[0], theta[1], theta[2], theta[3]],
        scale_out_col,
        size_col,
    })
}

/// Non-negative least squares by the active-set method.
///
/// Maintains a passive set of coordinates allowed to be positive; each
/// outer step moves the most violated coordinate into the passive set,
/// solves the unconstrained least-squares problem there, and walks back
/// along the segment to the last feasible point when the solution leaves
/// the non-negative orthant. Terminates at a point satisfying the KKT
/// conditions: `x >= 0`, and the gradient is non-positive on every zero
/// coordinate.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n_cols = a.ncols();
    let mut x = DVector::zeros(n_cols);
    let mut passive = vec![false; n_cols];

    let scale = a.iter().map(|v| v.abs()).fold(0.0f64, f64::max).max(1.0);
    let tol = 1e-10 * scale * b.amax().max(1.0);

    for _outer in 0..(3 * n_cols.max(8)) {
        let residual = b - a * &x;
        let gradient = a.transpose() * residual;
        let candidate = (0..n_cols)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| gradient[i].total_cmp(&gradient[j]));
        let Some(j_best) = candidate else { break };
        if gradient[j_best] <= tol {
            break;
        }
        passive[j_best] = true;

        // Inner loop: restore feasibility after each unconstrained solve.
        loop {
            let solution = solve_passive(a, b, &passive);
            let negative: Vec<usize> = (0..n_cols)
                .filter(|&j| passive[j] && solution[j] <= 0.0)
                .collect();
            if negative.is_empty() {
                x = solution;
                break;
            }
            let mut alpha = f64::INFINITY;
            for &j in &negative {
                let step = x[j] / (x[j] - solution[j]);
                if step < alpha {
                    alpha = step;
                }
            }
            let alpha = alpha.clamp(0.0, 1.0);
            x = &x + (solution - &x) * alpha;
            for j in 0..n_cols {
                if passive[j] && x[j].abs() <= tol.max(f64::EPSILON) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }

    x
}

/// Unconstrained least squares restricted to the passive columns.
fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let sub = a.select_columns(&cols);
    let partial = min_norm_lstsq(&sub, b);
    let mut full = DVector::zeros(passive.len());
    for (k, &j) in cols.iter().enumerate() {
        full[j] = partial[k];
    }
    full
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix {
        FeatureMatrix::from_rows(rows, Some(1), 0)
    }

    #[test]
    fn recovers_planted_nonnegative_coefficients() {
        // t = 10 + 2 * size / s, exactly on the feature map.
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for &size in &[100.0, 200.0, 400.0] {
            for &s in &[1.0, 2.0, 4.0, 8.0] {
                rows.push(vec![s, size]);
                y.push(10.0 + 2.0 * size / s);
            }
        }
        let model = fit_ernest(&matrix(rows), &y).unwrap();
        let theta = model.theta();
        assert_relative_eq!(theta[0], 10.0, epsilon = 1e-6);
        assert_relative_eq!(theta[1], 2.0, epsilon = 1e-6);
        assert!(theta[2].abs() <= 1e-6);
        assert!(theta[3].abs() <= 1e-6);
    }

    #[test]
    fn coefficients_are_never_negative() {
        // Strongly decreasing overhead would pull theta[3] negative if allowed.
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for &s in &[1.0, 2.0, 4.0, 8.0, 16.0] {
            rows.push(vec![s, 100.0]);
            y.push(1000.0 - 50.0 * s);
        }
        let model = fit_ernest(&matrix(rows), &y).unwrap();
        assert!(model.theta().iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn constant_runtimes_use_the_overhead_term() {
        let rows = vec![vec![1.0, 50.0], vec![2.0, 100.0], vec![4.0, 200.0], vec![8.0, 60.0]];
        let y = vec![500.0, 500.0, 500.0, 500.0];
        let model = fit_ernest(&matrix(rows), &y).unwrap();
        let theta = model.theta();
        assert_relative_eq!(theta[0], 500.0, epsilon = 1e-6);
        assert!(theta[1].abs() <= 1e-9);
        assert!(theta[2].abs() <= 1e-9);
        assert!(theta[3].abs() <= 1e-9);
        assert_relative_eq!(model.predict_row(&[3.0, 123.0]), 500.0, epsilon = 1e-6);
    }

    #[test]
    fn missing_size_feature_is_reported() {
        let x = FeatureMatrix::from_rows(vec![vec![2.0], vec![4.0]], None, 0);
        let err = fit_ernest(&x, &[10.0, 20.0]).unwrap_err();
        assert!(matches!(err, ModelError::MissingSizeFeature));
    }

    #[test]
    fn nnls_beats_no_fit_at_all() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 1.0, 2.0, 2.0]);
        let b = DVector::from_column_slice(&[5.0, 4.0, 6.0]);
        let x = nnls(&a, &b);
        assert!(x.iter().all(|&v| v >= 0.0));
        let fitted = (&b - &a * &x).norm_squared();
        let zero = b.norm_squared();
        assert!(fitted <= zero);
    }

    #[test]
    fn nnls_matches_unconstrained_when_solution_is_interior() {
        // Least-squares solution of this system is strictly positive.
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0]);
        let b = DVector::from_column_slice(&[1.0, 2.0, 3.1, 4.9]);
        let constrained = nnls(&a, &b);
        let unconstrained = min_norm_lstsq(&a, &b);
        assert_relative_eq!(constrained[0], unconstrained[0], epsilon = 1e-8);
        assert_relative_eq!(constrained[1], unconstrained[1], epsilon = 1e-8);
    }
}
