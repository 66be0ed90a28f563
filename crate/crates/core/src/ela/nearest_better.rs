//! Nearest-better clustering features: each point's distance to its nearest
//! neighbour against the distance to its nearest strictly better neighbour.

use crate::error::{Error, Result};

use super::{mean, pearson, sample_sd, MinimizationSample};

/// Per-point distances behind the nearest-better features.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestBetterStats {
    pub nearest: Vec<f64>,
    /// `None` for points without a strictly better point.
    pub nearest_better: Vec<Option<f64>>,
    /// Index of each point's nearest better neighbour.
    pub better_neighbour: Vec<Option<usize>>,
    /// How many points name this one as their nearest better neighbour.
    pub indegree: Vec<usize>,
}

pub fn nearest_better_stats(sample: &MinimizationSample) -> NearestBetterStats {
    let n = sample.len();
    let y = sample.y();
    let d = sample.distances();

    let nearest = (0..n)
        .map(|i| {
            d.row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| v)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    // Walk points from best to worst; everything strictly better than the
    // current value is the prefix ending where that value begins.
    let ranking = sample.ranking();
    let mut nearest_better = vec![None; n];
    let mut better_neighbour = vec![None; n];
    let mut block_start = 0;
    for pos in 0..n {
        let i = ranking[pos];
        if y[ranking[block_start]] < y[i] {
            block_start = pos;
        }
        let mut best: Option<(usize, f64)> = None;
        for &j in &ranking[..block_start] {
            let dist = d.get(i, j);
            best = match best {
                Some((bj, bd)) if bd < dist || (bd == dist && bj < j) => Some((bj, bd)),
                _ => Some((j, dist)),
            };
        }
        if let Some((j, dist)) = best {
            nearest_better[i] = Some(dist);
            better_neighbour[i] = Some(j);
        }
    }

    let mut indegree = vec![0; n];
    for j in better_neighbour.iter().flatten() {
        indegree[*j] += 1;
    }
    NearestBetterStats {
        nearest,
        nearest_better,
        better_neighbour,
        indegree,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NbcFeatures {
    pub sd_ratio: f64,
    pub mean_ratio: f64,
    pub cor: f64,
    pub dist_ratio_coeff_var: f64,
    pub nb_fitness_cor: f64,
}

impl NearestBetterStats {
    /// Nearest and nearest-better distances of points that have a better
    /// neighbour.
    pub fn paired(&self) -> (Vec<f64>, Vec<f64>) {
        self.nearest
            .iter()
            .zip(&self.nearest_better)
            .filter_map(|(&nn, nb)| nb.map(|nb| (nn, nb)))
            .unzip()
    }

    pub fn features(&self, y: &[f64]) -> Result<NbcFeatures> {
        let (nn_inc, nb) = self.paired();
        if nb.len() < 2 {
            return Err(Error::DegenerateSample(
                "fewer than two points have a better neighbour".into(),
            ));
        }
        let sd_nb = sample_sd(&nb);
        let mean_nb = mean(&nb);
        if super::is_constant(&nb) || sd_nb == 0.0 {
            return Err(Error::DegenerateSample(
                "nearest-better distances have zero spread".into(),
            ));
        }
        if mean_nb == 0.0 {
            return Err(Error::DegenerateSample("nearest-better distances are all zero".into()));
        }
        let cor = pearson(&nn_inc, &nb).ok_or_else(|| {
            Error::DegenerateSample("nearest-neighbour distances have zero spread".into())
        })?;
        let ratios: Vec<f64> = nn_inc.iter().zip(&nb).map(|(a, b)| a / b).collect();
        let indegree: Vec<f64> = self.indegree.iter().map(|&k| k as f64).collect();
        let nb_fitness_cor = pearson(&indegree, y).ok_or_else(|| {
            Error::DegenerateSample("nearest-better indegree has zero spread".into())
        })?;
        Ok(NbcFeatures {
            sd_ratio: sample_sd(&self.nearest) / sd_nb,
            mean_ratio: mean(&self.nearest) / mean_nb,
            cor,
            dist_ratio_coeff_var: sample_sd(&ratios) / mean(&ratios),
            nb_fitness_cor,
        })
    }
}

pub fn nbc_features(sample: &MinimizationSample) -> Result<NbcFeatures> {
    let n = sample.len();
    if n < 5 {
        return Err(Error::InsufficientData(format!(
            "nearest-better features need at least 5 points, got {n}"
        )));
    }
    let y = sample.y();
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateSample("response takes a single value".into()));
    }
    nearest_better_stats(sample).features(y)
}
