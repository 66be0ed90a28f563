//! Information content of the fitness sequence along a nearest-neighbour tour
//! through the sample.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::DistanceMatrix;
use crate::sampling::rng_from_seed;

use super::MinimizationSample;

/// Entropies closer than this count as equal when locating the maximum, so
/// that round-off does not decide between mathematically tied thresholds.
pub const ENTROPY_TIE: f64 = 1e-12;

/// Where the nearest-neighbour tour begins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TourStart {
    /// A row drawn uniformly with this seed.
    Seeded(u64),
    /// A fixed row.
    Index(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcSettings {
    /// Ascending, non-negative thresholds.
    pub epsilon: Vec<f64>,
    pub start: TourStart,
    /// Entropy level below which the landscape counts as settled.
    pub settling_sensitivity: f64,
}

impl Default for IcSettings {
    fn default() -> Self {
        IcSettings {
            epsilon: default_epsilon_grid(),
            start: TourStart::Seeded(0),
            settling_sensitivity: 0.05,
        }
    }
}

impl IcSettings {
    pub fn with_seed(seed: u64) -> Self {
        IcSettings {
            start: TourStart::Seeded(seed),
            ..Default::default()
        }
    }
}

/// `0` followed by 1000 log-spaced values from 1e-5 to 1e15.
pub fn default_epsilon_grid() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((0..1000).map(|i| 10f64.powf(-5.0 + 20.0 * i as f64 / 999.0)))
        .collect()
}

/// Visits every row once, always stepping to the closest unvisited row
/// (lower index on ties).
pub fn nearest_neighbour_tour(d: &DistanceMatrix, start: usize) -> Vec<usize> {
    let n = d.len();
    let mut visited = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    let mut current = start;
    visited[current] = true;
    tour.push(current);
    for _ in 1..n {
        let row = d.row(current);
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, &dist) in row.iter().enumerate() {
            if !visited[j] && dist < best_d {
                best = j;
                best_d = dist;
            }
        }
        visited[best] = true;
        tour.push(best);
        current = best;
    }
    tour
}

/// Response change per unit distance between consecutive tour points.
pub fn tour_slopes(sample: &MinimizationSample, tour: &[usize]) -> Result<Vec<f64>> {
    let y = sample.y();
    let d = sample.distances();
    tour.windows(2)
        .map(|w| {
            let step = d.get(w[0], w[1]);
            if step == 0.0 {
                Err(Error::DegenerateSample(format!(
                    "tour points {} and {} coincide",
                    w[0], w[1]
                )))
            } else {
                Ok((y[w[1]] - y[w[0]]) / step)
            }
        })
        .collect()
}

/// Three-letter encoding of slopes: `0` within `±eps`, otherwise the sign.
pub fn symbolize(slopes: &[f64], eps: f64) -> Vec<i8> {
    slopes
        .iter()
        .map(|&s| {
            if s.abs() <= eps {
                0
            } else if s > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Entropy (base 6) of consecutive unequal symbol pairs.
pub fn symbol_entropy(symbols: &[i8]) -> f64 {
    if symbols.len() < 2 {
        return 0.0;
    }
    let mut counts = [[0usize; 3]; 3];
    for w in symbols.windows(2) {
        counts[(w[0] + 1) as usize][(w[1] + 1) as usize] += 1;
    }
    let total = (symbols.len() - 1) as f64;
    let mut h = 0.0;
    for (a, row) in counts.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if a != b && c > 0 {
                let p = c as f64 / total;
                h -= p * p.log(6.0);
            }
        }
    }
    h
}

/// Length of the symbol string after dropping zeros and merging repeated
/// symbols, relative to the string length.
pub fn partial_information(symbols: &[i8]) -> f64 {
    if symbols.is_empty() {
        return 0.0;
    }
    let mut runs = 0usize;
    let mut last = 0i8;
    for &s in symbols {
        if s != 0 && s != last {
            runs += 1;
            last = s;
        }
    }
    runs as f64 / symbols.len() as f64
}

/// Entropy and partial information at every threshold of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IcProfile {
    pub epsilon: Vec<f64>,
    pub entropy: Vec<f64>,
    pub partial: Vec<f64>,
}

pub fn information_profile(slopes: &[f64], epsilon: &[f64]) -> IcProfile {
    let (entropy, partial) = epsilon
        .iter()
        .map(|&eps| {
            let symbols = symbolize(slopes, eps);
            (symbol_entropy(&symbols), partial_information(&symbols))
        })
        .unzip();
    IcProfile {
        epsilon: epsilon.to_vec(),
        entropy,
        partial,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcFeatures {
    pub h_max: f64,
    /// log10 of the smallest positive threshold whose entropy drops below
    /// the settling sensitivity.
    pub eps_s: f64,
    pub eps_max: f64,
    /// log10 of the smallest positive threshold whose entropy drops below
    /// half the maximum.
    pub eps_ratio: f64,
    pub m0: f64,
}

impl IcProfile {
    pub fn h_max(&self) -> f64 {
        self.entropy.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Summarizes the profile. `m0` is taken from the slopes directly so it
    /// does not depend on `0` being on the grid.
    pub fn features(&self, slopes: &[f64], sensitivity: f64) -> Result<IcFeatures> {
        let h_max = self.h_max();
        let eps_max = self
            .epsilon
            .iter()
            .zip(&self.entropy)
            .find(|(_, &h)| h >= h_max - ENTROPY_TIE)
            .map(|(&e, _)| e)
            .expect("non-empty grid");
        let first_below = |level: f64, what: &str| {
            self.epsilon
                .iter()
                .zip(&self.entropy)
                .find(|(&e, &h)| e > 0.0 && h < level)
                .map(|(&e, _)| e.log10())
                .ok_or_else(|| {
                    Error::DegenerateSample(format!(
                        "no positive threshold brings the entropy below {what} ({level})"
                    ))
                })
        };
        let eps_s = first_below(sensitivity, "the settling sensitivity")?;
        let eps_ratio = first_below(0.5 * h_max, "half its maximum")?;
        Ok(IcFeatures {
            h_max,
            eps_s,
            eps_max,
            eps_ratio,
            m0: partial_information(&symbolize(slopes, 0.0)),
        })
    }
}

fn tour_start(n: usize, start: TourStart) -> Result<usize> {
    match start {
        TourStart::Seeded(seed) => Ok(rng_from_seed(seed).random_range(0..n)),
        TourStart::Index(i) if i < n => Ok(i),
        TourStart::Index(i) => Err(Error::InvalidInput(format!(
            "tour start {i} outside sample of {n}"
        ))),
    }
}

pub fn information_content_features(
    sample: &MinimizationSample,
    settings: &IcSettings,
) -> Result<IcFeatures> {
    let n = sample.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "information content needs at least 3 points, got {n}"
        )));
    }
    if settings.epsilon.is_empty()
        || settings.epsilon.iter().any(|e| e.is_nan() || *e < 0.0)
        || settings.epsilon.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidInput(
            "epsilon grid must be non-empty, non-negative and strictly ascending".into(),
        ));
    }
    let start = tour_start(n, settings.start)?;
    let tour = nearest_neighbour_tour(sample.distances(), start);
    let slopes = tour_slopes(sample, &tour)?;
    information_profile(&slopes, &settings.epsilon).features(&slopes, settings.settling_sensitivity)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_sample(y: Vec<f64>) -> MinimizationSample {
        let x = (0..y.len()).map(|i| vec![i as f64]).collect();
        MinimizationSample::new(x, y).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = default_epsilon_grid();
        assert_eq!(g.len(), 1001);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 1e-5).abs() < 1e-20);
        assert!((g[1000] / 1e15 - 1.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tour_follows_line_from_start() {
        let s = line_sample(vec![0.0; 6]);
        assert_eq!(nearest_neighbour_tour(s.distances(), 0), vec![0, 1, 2, 3, 4, 5]);
        // ties at distance 1 go to the lower index
        assert_eq!(nearest_neighbour_tour(s.distances(), 3), vec![3, 2, 1, 0, 4, 5]);
    }

    #[test]
    fn constant_response_has_no_information() {
        let s = line_sample(vec![2.0; 10]);
        let tour = nearest_neighbour_tour(s.distances(), 0);
        let slopes = tour_slopes(&s, &tour).unwrap();
        let profile = information_profile(&slopes, &default_epsilon_grid());
        assert_eq!(profile.h_max(), 0.0);
        assert_eq!(partial_information(&symbolize(&slopes, 0.0)), 0.0);
        let err = information_content_features(&s, &IcSettings::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateSample(_)));
    }

    #[test]
    fn monotone_response_is_one_run() {
        let n = 12;
        let s = line_sample((0..n).map(|i| (i * i) as f64).collect());
        let tour = nearest_neighbour_tour(s.distances(), 0);
        let slopes = tour_slopes(&s, &tour).unwrap();
        let symbols = symbolize(&slopes, 0.5);
        assert!(symbols.iter().all(|&v| v == 1));
        assert_eq!(symbol_entropy(&symbols), 0.0);
        assert!((partial_information(&symbols) - 1.0 / (n - 1) as f64).abs() < 1e-15);
    }

    #[test]
    fn zig_zag_entropy_is_log6_of_2() {
        let y: Vec<f64> = (0..12).map(|i| (i % 2) as f64).collect();
        let s = line_sample(y);
        let tour = nearest_neighbour_tour(s.distances(), 0);
        let slopes = tour_slopes(&s, &tour).unwrap();
        let symbols = symbolize(&slopes, 0.0);
        assert_eq!(symbols.len(), 11);
        // pairs: 10, alternating (1,-1) and (-1,1) five times each
        let h = symbol_entropy(&symbols);
        assert!((h - 2f64.log(6.0)).abs() < 1e-12, "{h}");
        assert!((h - 0.3869).abs() < 1e-4);
    }

    #[test]
    fn features_on_rugged_line() {
        let y: Vec<f64> = (0..40).map(|i| ((i * 37) % 11) as f64 * 0.1).collect();
        let s = line_sample(y);
        let settings = IcSettings { start: TourStart::Index(0), ..Default::default() };
        let f = information_content_features(&s, &settings).unwrap();
        assert!(f.h_max > 0.0 && f.h_max <= 1.0);
        assert!(f.eps_s.is_finite() && f.eps_ratio.is_finite());
        assert!(f.m0 > 0.0 && f.m0 <= 1.0);
    }

    #[test]
    fn bad_grid_is_rejected() {
        let s = line_sample(vec![0.0, 1.0, 0.5, 2.0]);
        let settings = IcSettings { epsilon: vec![1.0, 0.5], ..Default::default() };
        assert!(information_content_features(&s, &settings).is_err());
    }
}
