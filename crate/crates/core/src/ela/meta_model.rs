//! Least-squares meta-models of the response.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::least_squares;

use super::{MinimizationSample, RANK_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaModel {
    /// Intercept and linear terms.
    Linear,
    /// Linear terms plus every pairwise product.
    LinearInteraction,
    /// Linear terms plus squares.
    Quadratic,
}

impl MetaModel {
    /// Number of coefficients besides the intercept in `dim` dimensions.
    pub fn term_count(self, dim: usize) -> usize {
        match self {
            MetaModel::Linear => dim,
            MetaModel::LinearInteraction => dim + dim * (dim - 1) / 2,
            MetaModel::Quadratic => 2 * dim,
        }
    }

    /// Model matrix with the intercept column first.
    pub fn design_matrix(self, x: &[Vec<f64>]) -> DMatrix<f64> {
        let dim = x[0].len();
        let cols = 1 + self.term_count(dim);
        DMatrix::from_fn(x.len(), cols, |r, c| {
            let row = &x[r];
            if c == 0 {
                return 1.0;
            }
            let c = c - 1;
            if c < dim {
                return row[c];
            }
            let extra = c - dim;
            match self {
                MetaModel::Linear => unreachable!("linear model has no extra terms"),
                MetaModel::Quadratic => row[extra] * row[extra],
                MetaModel::LinearInteraction => {
                    let (i, j) = pair_at(extra, dim);
                    row[i] * row[j]
                }
            }
        })
    }
}

/// The `k`-th pair `(i, j)`, `i < j`, in row-major order.
fn pair_at(mut k: usize, dim: usize) -> (usize, usize) {
    for i in 0..dim {
        let len = dim - i - 1;
        if k < len {
            return (i, i + 1 + k);
        }
        k -= len;
    }
    unreachable!("pair index out of range")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    pub r2: f64,
    pub adj_r2: f64,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

pub fn fit_meta_model(sample: &MinimizationSample, model: MetaModel) -> Result<ModelFit> {
    let n = sample.len();
    let p = model.term_count(sample.dim());
    if n <= p + 1 {
        return Err(Error::InsufficientData(format!(
            "{model:?} model has {p} terms but only {n} observations"
        )));
    }
    let y = sample.y();
    let mean = y.iter().sum::<f64>() / n as f64;
    let total: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if super::is_constant(y) || total == 0.0 {
        return Err(Error::DegenerateSample("response has zero variance".into()));
    }
    let a = model.design_matrix(sample.x());
    let fit = least_squares(&a, y, RANK_TOLERANCE)?;
    let r2 = 1.0 - fit.residual_sum_squares / total;
    let adj_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - p as f64 - 1.0);
    Ok(ModelFit {
        r2,
        adj_r2,
        intercept: fit.coefficients[0],
        coefficients: fit.coefficients,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaModelFeatures {
    pub lin_simple_adj_r2: f64,
    pub lin_simple_intercept: f64,
    pub lin_w_interact_adj_r2: f64,
    pub quad_simple_adj_r2: f64,
}

pub fn meta_model_features(sample: &MinimizationSample) -> Result<MetaModelFeatures> {
    let linear = fit_meta_model(sample, MetaModel::Linear)?;
    let interact = fit_meta_model(sample, MetaModel::LinearInteraction)?;
    let quad = fit_meta_model(sample, MetaModel::Quadratic)?;
    Ok(MetaModelFeatures {
        lin_simple_adj_r2: linear.adj_r2,
        lin_simple_intercept: linear.intercept,
        lin_w_interact_adj_r2: interact.adj_r2,
        quad_simple_adj_r2: quad.adj_r2,
    })
}
