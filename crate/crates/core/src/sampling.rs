//! Seeded Latin hypercube designs and without-replacement bootstrap
//! subsamples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::design_space::DesignSpace;
use crate::error::{Error, Result};

/// Mixes a stream index into a master seed (splitmix64 finalizer).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct DoePlan {
    pub space: DesignSpace,
    pub n: usize,
    pub seed: u64,
}

/// A Latin hypercube design. `continuous` holds the stratified values before
/// integer parameters are rounded; `design` holds the legal values.
#[derive(Debug, Clone, PartialEq)]
pub struct LhsSample {
    pub continuous: Vec<Vec<f64>>,
    pub design: Vec<Vec<f64>>,
}

pub fn lhs_sample(plan: &DoePlan) -> Result<LhsSample> {
    let n = plan.n;
    if n == 0 {
        return Err(Error::InvalidInput("a design needs at least one row".into()));
    }
    let dim = plan.space.dim();
    let mut rng = rng_from_seed(plan.seed);
    let mut continuous = vec![vec![0.0; dim]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for (c, p) in plan.space.parameters().iter().enumerate() {
        strata.shuffle(&mut rng);
        for (row, &stratum) in continuous.iter_mut().zip(&strata) {
            // offset in [0, 1) measured down from the stratum's closed top end
            let offset: f64 = rng.random();
            let u = (stratum as f64 + 1.0 - offset) / n as f64;
            let value = p.lo + u * p.width();
            row[c] = if value > p.lo { value.min(p.hi) } else { p.lo.next_up() };
        }
    }
    let design = continuous
        .iter()
        .map(|row| {
            row.iter()
                .zip(plan.space.parameters())
                .map(|(&v, p)| p.quantize(v))
                .collect()
        })
        .collect();
    Ok(LhsSample { continuous, design })
}

/// Number of values in each of the `n` equal-width strata of `(lo, hi]`.
pub fn stratum_counts(values: &[f64], lo: f64, hi: f64, n: usize) -> Vec<usize> {
    let mut counts = vec![0; n];
    for &v in values {
        let u = (v - lo) / (hi - lo);
        let idx = ((u * n as f64).ceil() as usize).clamp(1, n) - 1;
        counts[idx] += 1;
    }
    counts
}

/// True when every column of `continuous` has exactly one value per stratum.
pub fn is_latin(continuous: &[Vec<f64>], space: &DesignSpace) -> bool {
    let n = continuous.len();
    space.parameters().iter().enumerate().all(|(c, p)| {
        let column: Vec<f64> = continuous.iter().map(|row| row[c]).collect();
        stratum_counts(&column, p.lo, p.hi, n).iter().all(|&k| k == 1)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapPlan {
    pub subsample_size: usize,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for BootstrapPlan {
    fn default() -> Self {
        BootstrapPlan {
            subsample_size: 800,
            repetitions: 30,
            seed: 0,
        }
    }
}

/// Index set of one replicate, sorted ascending. Each replicate has its own
/// seed derived from the master seed, so replicates can be drawn in any order.
pub fn bootstrap_replicate(n: usize, plan: &BootstrapPlan, repetition: usize) -> Vec<usize> {
    let mut rng = rng_from_seed(derive_seed(plan.seed, repetition as u64));
    let mut indices = rand::seq::index::sample(&mut rng, n, plan.subsample_size).into_vec();
    indices.sort_unstable();
    indices
}

pub fn bootstrap_indices(n: usize, plan: &BootstrapPlan) -> Result<Vec<Vec<usize>>> {
    if plan.repetitions == 0 || plan.subsample_size == 0 {
        return Err(Error::InvalidInput(
            "bootstrap needs a positive size and repetition count".into(),
        ));
    }
    if plan.subsample_size > n {
        return Err(Error::InsufficientData(format!(
            "bootstrap size {} exceeds population of {n}",
            plan.subsample_size
        )));
    }
    Ok((0..plan.repetitions)
        .map(|r| bootstrap_replicate(n, plan, r))
        .collect())
}
