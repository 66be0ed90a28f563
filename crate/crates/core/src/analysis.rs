//! Correlations, top-k parameter densities and nearest-neighbour distance
//! statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::design_space::{DesignSpace, EvaluatedDoe};
use crate::ela::pearson;
use crate::error::{Error, Result};
use crate::linalg::euclidean;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub parameter: String,
    /// `None` when the parameter or the response is constant.
    pub accuracy: Option<f64>,
    pub cpu_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub rows: Vec<CorrelationRow>,
}

impl CorrelationReport {
    pub fn get(&self, parameter: &str) -> Option<&CorrelationRow> {
        self.rows.iter().find(|r| r.parameter == parameter)
    }
}

/// Pearson r of every parameter against accuracy and, when present, CPU time.
pub fn pearson_correlations(doe: &EvaluatedDoe, space: &DesignSpace) -> Result<CorrelationReport> {
    let n = doe.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "correlations need at least 3 rows, got {n}"
        )));
    }
    if doe.x[0].len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: doe.x[0].len() });
    }
    let rows = space
        .parameters()
        .iter()
        .enumerate()
        .map(|(c, p)| {
            let column: Vec<f64> = doe.x.iter().map(|r| r[c]).collect();
            CorrelationRow {
                parameter: p.name.clone(),
                accuracy: pearson(&column, &doe.accuracy),
                cpu_time: doe.cpu_time.as_ref().and_then(|t| pearson(&column, t)),
            }
        })
        .collect();
    Ok(CorrelationReport { rows })
}

pub const DENSITY_GRID_POINTS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityCurve {
    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(g, d)| 0.5 * (g[1] - g[0]) * (d[0] + d[1]))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParameterDensity {
    Curve {
        parameter: String,
        median: f64,
        #[serde(flatten)]
        curve: DensityCurve,
    },
    /// Every selected row shares one value.
    PointMass { parameter: String, value: f64 },
}

impl ParameterDensity {
    pub fn parameter(&self) -> &str {
        match self {
            ParameterDensity::Curve { parameter, .. } | ParameterDensity::PointMass { parameter, .. } => {
                parameter
            }
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Silverman's rule `0.9 · min(sd, IQR / 1.34) · n^(−1/5)`; falls back to the
/// standard deviation alone when the IQR is zero.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * n.powf(-0.2)
}

/// Gaussian kernel density on a regular grid over `[min − 3h, max + 3h]`.
pub fn gaussian_kde(values: &[f64], points: usize) -> Result<DensityCurve> {
    if values.len() < 2 || points < 2 {
        return Err(Error::InsufficientData("density needs at least 2 values".into()));
    }
    let h = silverman_bandwidth(values);
    if crate::ela::is_constant(values) || h.is_nan() || h <= 0.0 {
        return Err(Error::DegenerateSample("values have no spread".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min) - 3.0 * h;
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
    let step = (hi - lo) / (points - 1) as f64;
    let norm = 1.0 / (values.len() as f64 * h * (2.0 * PI).sqrt());
    let grid: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();
    let density = grid
        .iter()
        .map(|g| norm * values.iter().map(|v| (-0.5 * ((g - v) / h).powi(2)).exp()).sum::<f64>())
        .collect();
    Ok(DensityCurve { grid, density, bandwidth: h })
}

/// Densities of every parameter over the `k` most accurate rows.
pub fn top_k_densities(
    doe: &EvaluatedDoe,
    space: &DesignSpace,
    k: usize,
) -> Result<Vec<ParameterDensity>> {
    let n = doe.len();
    if k < 3 || k > n {
        return Err(Error::InsufficientData(format!(
            "top-k densities need 3 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let top = doe.top_k(k);
    space
        .parameters()
        .iter()
        .enumerate()
        .map(|(c, p)| {
            let mut values: Vec<f64> = top.iter().map(|&r| doe.x[r][c]).collect();
            values.sort_by(f64::total_cmp);
            if values[0] == values[k - 1] {
                return Ok(ParameterDensity::PointMass {
                    parameter: p.name.clone(),
                    value: values[0],
                });
            }
            let curve = gaussian_kde(&values, DENSITY_GRID_POINTS)
                .map_err(|e| e.context(format!("parameter {}", p.name)))?;
            Ok(ParameterDensity::Curve {
                parameter: p.name.clone(),
                median: quantile(&values, 0.5),
                curve,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    /// Sample statistics; the deviation is 0 for a single value.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        MeanSd { mean, sd }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnStats {
    /// Distances from the label's rows to their `k` nearest foreign rows.
    pub foreign_knn: MeanSd,
    /// Mean `k`-NN distance of each of those neighbours within the foreign set.
    pub neighbour_self_knn: MeanSd,
}

/// The `k` nearest candidates to `query`, by distance then row index.
fn nearest(vectors: &[Vec<f64>], query: &[f64], candidates: &[usize], k: usize, skip: Option<usize>) -> Vec<(f64, usize)> {
    let mut d: Vec<(f64, usize)> = candidates
        .iter()
        .filter(|&&j| Some(j) != skip)
        .map(|&j| (euclidean(query, &vectors[j]), j))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.truncate(k);
    d
}

/// For each label `L`, compares how far its rows sit from their `k` nearest
/// rows outside `L` with how tightly those neighbours pack among themselves.
/// Labels passing `is_query` are reported; only rows whose label passes
/// `is_candidate` enter the foreign set.
pub fn knn_distance_stats(
    vectors: &[Vec<f64>],
    labels: &[String],
    k: usize,
    is_query: impl Fn(&str) -> bool,
    is_candidate: impl Fn(&str) -> bool,
) -> Result<BTreeMap<String, KnnStats>> {
    if vectors.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: vectors.len(), found: labels.len() });
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if vectors.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("feature vectors".into()));
    }
    let names: BTreeSet<&str> = labels.iter().map(String::as_str).filter(|l| is_query(l)).collect();
    let mut out = BTreeMap::new();
    for label in names {
        let foreign: Vec<usize> = (0..vectors.len())
            .filter(|&j| labels[j] != label && is_candidate(&labels[j]))
            .collect();
        if foreign.len() < k + 1 {
            return Err(Error::InsufficientData(format!(
                "label {label} has {} foreign candidates, need at least {}",
                foreign.len(),
                k + 1
            )));
        }
        let mut distances = Vec::new();
        let mut neighbours = BTreeSet::new();
        for (i, v) in vectors.iter().enumerate().filter(|(i, _)| labels[*i] == label) {
            for (d, j) in nearest(vectors, v, &foreign, k, Some(i)) {
                distances.push(d);
                neighbours.insert(j);
            }
        }
        let own: Vec<f64> = neighbours
            .iter()
            .map(|&j| {
                let near = nearest(vectors, &vectors[j], &foreign, k, Some(j));
                near.iter().map(|(d, _)| d).sum::<f64>() / near.len() as f64
            })
            .collect();
        out.insert(
            label.to_string(),
            KnnStats {
                foreign_knn: MeanSd::of(&distances),
                neighbour_self_knn: MeanSd::of(&own),
            },
        );
    }
    Ok(out)
}
