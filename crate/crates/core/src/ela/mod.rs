//! Exploratory landscape features of a sampled objective.
//!
//! All feature families assume minimization: lower `y` is better. Use
//! [`orient_for_minimization`] to turn an accuracy column into that form.

mod dispersion;
mod distribution;
mod information;
mod meta_model;
mod nearest_better;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FeatureFamily, Result};
use crate::linalg::DistanceMatrix;

pub use dispersion::{dispersion_features, top_count, DispersionFeatures, QuantileDispersion};
pub use distribution::{distribution_features, DistributionFeatures};
pub use information::{
    default_epsilon_grid, information_content_features, information_profile,
    nearest_neighbour_tour, symbolize, symbol_entropy, partial_information, tour_slopes,
    IcFeatures, IcProfile, IcSettings, TourStart, ENTROPY_TIE,
};
pub use meta_model::{fit_meta_model, meta_model_features, MetaModel, MetaModelFeatures, ModelFit};
pub use nearest_better::{nbc_features, nearest_better_stats, NbcFeatures, NearestBetterStats};

/// True when every value equals the first; round-off in a computed mean
/// cannot make such data look spread out.
pub(crate) fn is_constant(values: &[f64]) -> bool {
    values.iter().all(|v| *v == values[0])
}

/// Rank tolerance of the least-squares fits, relative to the largest
/// diagonal entry of the triangular factor.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// The 20 feature names in output column order.
pub const FEATURE_NAMES: [&str; 20] = [
    "disp.diff_mean_02",
    "disp.diff_mean_05",
    "disp.ratio_mean_02",
    "disp.ratio_mean_05",
    "distr.skewness",
    "distr.kurtosis",
    "ic.h.max",
    "ic.eps.s",
    "ic.eps.max",
    "ic.eps.ratio",
    "ic.m0",
    "lin_simple.adj_r2",
    "lin_simple.intercept",
    "lin_w_interact.adj_r2",
    "quad_simple.adj_r2",
    "nbc.nn_nb.sd_ratio",
    "nbc.nn_nb.mean_ratio",
    "nbc.nn_nb.cor",
    "nbc.dist_ratio.coeff_var",
    "nbc.nb_fitness.cor",
];

/// Negates accuracy so that the best design has the lowest value.
pub fn orient_for_minimization(accuracy: &[f64]) -> Vec<f64> {
    accuracy.iter().map(|a| -a).collect()
}

/// A design on the common box paired with a minimization response.
#[derive(Debug, Clone)]
pub struct MinimizationSample {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    distances: DistanceMatrix,
}

impl MinimizationSample {
    /// Rejects mismatched lengths, ragged or non-finite rows and duplicated
    /// design points.
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "{} design rows but {} responses",
                x.len(),
                y.len()
            )));
        }
        if x.is_empty() {
            return Err(Error::InsufficientData("empty sample".into()));
        }
        let dim = x[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("design rows have no columns".into()));
        }
        for (r, row) in x.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteInput(format!("design row {r}")));
            }
        }
        if let Some(r) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(format!("response {r}")));
        }
        if let Some((a, b)) = find_duplicate(&x) {
            return Err(Error::InvalidInput(format!(
                "design rows {a} and {b} are identical"
            )));
        }
        let distances = DistanceMatrix::from_points(&x);
        Ok(MinimizationSample { x, y, distances })
    }

    pub fn x(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.distances
    }

    /// Row indices ordered by response, best first; ties keep row order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.y[a].total_cmp(&self.y[b]));
        order
    }

    /// Subsample by row indices.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        let x = rows.iter().map(|&r| self.x[r].clone()).collect();
        let y = rows.iter().map(|&r| self.y[r]).collect();
        Self::new(x, y)
    }
}

/// First pair of identical rows, by lexicographic sort.
pub(crate) fn find_duplicate(rows: &[Vec<f64>]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let lex = |a: &usize, b: &usize| {
        rows[*a]
            .iter()
            .zip(&rows[*b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    order.sort_by(lex);
    order.windows(2).find_map(|w| {
        let same = rows[w[0]].iter().zip(&rows[w[1]]).all(|(a, b)| a == b);
        same.then(|| (w[0].min(w[1]), w[0].max(w[1])))
    })
}

/// The 20-element feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapeFeatures {
    #[serde(rename = "disp.diff_mean_02")]
    pub disp_diff_mean_02: f64,
    #[serde(rename = "disp.diff_mean_05")]
    pub disp_diff_mean_05: f64,
    #[serde(rename = "disp.ratio_mean_02")]
    pub disp_ratio_mean_02: f64,
    #[serde(rename = "disp.ratio_mean_05")]
    pub disp_ratio_mean_05: f64,
    #[serde(rename = "distr.skewness")]
    pub distr_skewness: f64,
    #[serde(rename = "distr.kurtosis")]
    pub distr_kurtosis: f64,
    #[serde(rename = "ic.h.max")]
    pub ic_h_max: f64,
    #[serde(rename = "ic.eps.s")]
    pub ic_eps_s: f64,
    #[serde(rename = "ic.eps.max")]
    pub ic_eps_max: f64,
    #[serde(rename = "ic.eps.ratio")]
    pub ic_eps_ratio: f64,
    #[serde(rename = "ic.m0")]
    pub ic_m0: f64,
    #[serde(rename = "lin_simple.adj_r2")]
    pub lin_simple_adj_r2: f64,
    #[serde(rename = "lin_simple.intercept")]
    pub lin_simple_intercept: f64,
    #[serde(rename = "lin_w_interact.adj_r2")]
    pub lin_w_interact_adj_r2: f64,
    #[serde(rename = "quad_simple.adj_r2")]
    pub quad_simple_adj_r2: f64,
    #[serde(rename = "nbc.nn_nb.sd_ratio")]
    pub nbc_nn_nb_sd_ratio: f64,
    #[serde(rename = "nbc.nn_nb.mean_ratio")]
    pub nbc_nn_nb_mean_ratio: f64,
    #[serde(rename = "nbc.nn_nb.cor")]
    pub nbc_nn_nb_cor: f64,
    #[serde(rename = "nbc.dist_ratio.coeff_var")]
    pub nbc_dist_ratio_coeff_var: f64,
    #[serde(rename = "nbc.nb_fitness.cor")]
    pub nbc_nb_fitness_cor: f64,
}

impl LandscapeFeatures {
    /// Values in [`FEATURE_NAMES`] order.
    pub fn to_array(&self) -> [f64; 20] {
        [
            self.disp_diff_mean_02,
            self.disp_diff_mean_05,
            self.disp_ratio_mean_02,
            self.disp_ratio_mean_05,
            self.distr_skewness,
            self.distr_kurtosis,
            self.ic_h_max,
            self.ic_eps_s,
            self.ic_eps_max,
            self.ic_eps_ratio,
            self.ic_m0,
            self.lin_simple_adj_r2,
            self.lin_simple_intercept,
            self.lin_w_interact_adj_r2,
            self.quad_simple_adj_r2,
            self.nbc_nn_nb_sd_ratio,
            self.nbc_nn_nb_mean_ratio,
            self.nbc_nn_nb_cor,
            self.nbc_dist_ratio_coeff_var,
            self.nbc_nb_fitness_cor,
        ]
    }

    pub fn from_array(v: [f64; 20]) -> Self {
        LandscapeFeatures {
            disp_diff_mean_02: v[0],
            disp_diff_mean_05: v[1],
            disp_ratio_mean_02: v[2],
            disp_ratio_mean_05: v[3],
            distr_skewness: v[4],
            distr_kurtosis: v[5],
            ic_h_max: v[6],
            ic_eps_s: v[7],
            ic_eps_max: v[8],
            ic_eps_ratio: v[9],
            ic_m0: v[10],
            lin_simple_adj_r2: v[11],
            lin_simple_intercept: v[12],
            lin_w_interact_adj_r2: v[13],
            quad_simple_adj_r2: v[14],
            nbc_nn_nb_sd_ratio: v[15],
            nbc_nn_nb_mean_ratio: v[16],
            nbc_nn_nb_cor: v[17],
            nbc_dist_ratio_coeff_var: v[18],
            nbc_nb_fitness_cor: v[19],
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES
            .iter()
            .position(|&n| n == name)
            .map(|i| self.to_array()[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> {
        FEATURE_NAMES.into_iter().zip(self.to_array())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Smallest sample size accepted by [`compute_all`] per dimension.
pub const MIN_ROWS_PER_DIMENSION: usize = 5;

/// Dispersion quantiles of the feature vector.
pub const DISPERSION_QUANTILES: [f64; 2] = [0.02, 0.05];

/// Computes all 20 features. Failures of individual families are collected
/// and reported together.
pub fn compute_all(sample: &MinimizationSample, ic: &IcSettings) -> Result<LandscapeFeatures> {
    let (n, d) = (sample.len(), sample.dim());
    if n < MIN_ROWS_PER_DIMENSION * d {
        return Err(Error::InsufficientData(format!(
            "{n} rows in {d} dimensions; at least {} required",
            MIN_ROWS_PER_DIMENSION * d
        )));
    }
    let mut errors = Vec::new();
    let mut keep = |family: FeatureFamily, r: Result<Vec<f64>>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(e.in_family(family));
            None
        }
    };

    let disp = keep(
        FeatureFamily::Dispersion,
        dispersion_features(sample, &DISPERSION_QUANTILES).map(|f| {
            let q = &f.per_quantile;
            vec![q[0].diff_mean, q[1].diff_mean, q[0].ratio_mean, q[1].ratio_mean]
        }),
    );
    let distr = keep(
        FeatureFamily::Distribution,
        distribution_features(sample.y()).map(|f| vec![f.skewness, f.kurtosis]),
    );
    let info = keep(
        FeatureFamily::InformationContent,
        information_content_features(sample, ic)
            .map(|f| vec![f.h_max, f.eps_s, f.eps_max, f.eps_ratio, f.m0]),
    );
    let meta = keep(
        FeatureFamily::MetaModel,
        meta_model_features(sample).map(|f| {
            vec![
                f.lin_simple_adj_r2,
                f.lin_simple_intercept,
                f.lin_w_interact_adj_r2,
                f.quad_simple_adj_r2,
            ]
        }),
    );
    let nbc = keep(
        FeatureFamily::NearestBetter,
        nbc_features(sample).map(|f| {
            vec![f.sd_ratio, f.mean_ratio, f.cor, f.dist_ratio_coeff_var, f.nb_fitness_cor]
        }),
    );

    match errors.len() {
        0 => {}
        1 => return Err(errors.pop().expect("one error")),
        _ => return Err(Error::Multiple(errors)),
    }
    let values: Vec<f64> = [disp, distr, info, meta, nbc]
        .into_iter()
        .flat_map(|v| v.expect("no family failed"))
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::DegenerateSample(format!(
            "feature {} is not finite",
            FEATURE_NAMES[i]
        )));
    }
    let array: [f64; 20] = values.try_into().expect("20 feature values");
    Ok(LandscapeFeatures::from_array(array))
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (n − 1 denominator).
pub(crate) fn sample_sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt()
}

/// Pearson correlation, or `None` when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if is_constant(a) || is_constant(b) {
        return None;
    }
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        None
    } else {
        Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
    }
}
