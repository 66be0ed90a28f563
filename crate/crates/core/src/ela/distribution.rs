use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionFeatures {
    pub skewness: f64,
    /// Excess kurtosis (zero for a normal distribution).
    pub kurtosis: f64,
}

/// Moment-based skewness `m3 / m2^1.5` and excess kurtosis `m4 / m2² − 3`.
pub fn distribution_features(y: &[f64]) -> Result<DistributionFeatures> {
    if y.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "distribution features need at least 3 values, got {}",
            y.len()
        )));
    }
    if super::is_constant(y) {
        return Err(Error::DegenerateSample("response has zero variance".into()));
    }
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in y {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    Ok(DistributionFeatures {
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2) - 3.0,
    })
}
