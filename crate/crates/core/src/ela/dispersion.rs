use crate::error::{Error, Result};
use crate::linalg::DistanceMatrix;

use super::MinimizationSample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileDispersion {
    pub quantile: f64,
    pub diff_mean: f64,
    pub ratio_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionFeatures {
    pub per_quantile: Vec<QuantileDispersion>,
}

/// Size of the best subset for quantile `q`: ⌈q·n⌉, with products that are
/// integral up to rounding noise taken as exact.
pub fn top_count(q: f64, n: usize) -> usize {
    let raw = q * n as f64;
    let nearest = raw.round();
    if (raw - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        raw.ceil() as usize
    }
}

fn mean_pairwise(d: &DistanceMatrix, rows: &[usize]) -> f64 {
    let mut total = 0.0;
    let mut pairs = 0usize;
    for (a, &i) in rows.iter().enumerate() {
        for &j in &rows[a + 1..] {
            total += d.get(i, j);
            pairs += 1;
        }
    }
    total / pairs as f64
}

/// Mean pairwise distance of the best ⌈q·n⌉ points against that of the whole
/// sample, as a difference and a ratio.
pub fn dispersion_features(
    sample: &MinimizationSample,
    quantiles: &[f64],
) -> Result<DispersionFeatures> {
    let n = sample.len();
    let d = sample.distances();
    if n < 2 {
        return Err(Error::InsufficientData("dispersion needs at least two points".into()));
    }
    let all: Vec<usize> = (0..n).collect();
    let overall = mean_pairwise(d, &all);
    if overall == 0.0 {
        return Err(Error::DegenerateSample("all design points coincide".into()));
    }
    let ranking = sample.ranking();
    let per_quantile = quantiles
        .iter()
        .map(|&q| {
            let k = top_count(q, n);
            if k < 2 {
                return Err(Error::InsufficientData(format!(
                    "top {:.0}% of {n} points holds {k} point(s); at least 2 needed",
                    q * 100.0
                )));
            }
            let top = mean_pairwise(d, &ranking[..k]);
            Ok(QuantileDispersion {
                quantile: q,
                diff_mean: top - overall,
                ratio_mean: top / overall,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DispersionFeatures { per_quantile })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_count_rounds_up() {
        assert_eq!(top_count(0.02, 100), 2);
        assert_eq!(top_count(0.05, 100), 5);
        assert_eq!(top_count(0.02, 800), 16);
        assert_eq!(top_count(0.05, 30), 2);
        assert_eq!(top_count(0.02, 1000), 20);
    }

    #[test]
    fn constant_response_takes_first_rows() {
        // points on a line; the first ⌈0.05·40⌉ = 2 rows are 0 and 1
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![(i * i) as f64]).collect();
        let s = MinimizationSample::new(x, vec![0.0; 40]).unwrap();
        let f = dispersion_features(&s, &[0.05]).unwrap();
        let all: f64 = {
            let mut t = 0.0;
            for i in 0..40 {
                for j in (i + 1)..40 {
                    t += ((j * j - i * i) as f64).abs();
                }
            }
            t / (40.0 * 39.0 / 2.0)
        };
        assert!((f.per_quantile[0].ratio_mean - 1.0 / all).abs() < 1e-12);
    }

    #[test]
    fn subset_of_one_is_rejected() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let s = MinimizationSample::new(x, (0..10).map(f64::from).collect()).unwrap();
        assert!(matches!(
            dispersion_features(&s, &[0.02]),
            Err(Error::InsufficientData(_))
        ));
    }
}
