//! End-to-end feature runs over evaluated designs and their bootstrap
//! replicates.

use rayon::prelude::*;

use crate::design_space::{rescale_to_box, DesignSpace, EvaluatedDoe};
use crate::ela::{compute_all, orient_for_minimization, IcSettings, LandscapeFeatures, MinimizationSample};
use crate::error::Result;
use crate::sampling::{bootstrap_indices, derive_seed, BootstrapPlan};

/// Common box every design is mapped onto before feature computation.
pub const FEATURE_BOX: (f64, f64) = (-5.0, 5.0);

/// Validates `doe`, maps it onto [`FEATURE_BOX`] and negates accuracy.
pub fn nas_sample(doe: &EvaluatedDoe, space: &DesignSpace) -> Result<MinimizationSample> {
    doe.validate(space)?;
    let x = rescale_to_box(&doe.x, space, FEATURE_BOX.0, FEATURE_BOX.1)?;
    MinimizationSample::new(x, orient_for_minimization(&doe.accuracy))
}

/// Features of one replicate; replicate 0 is the full sample.
#[derive(Debug)]
pub struct ReplicateOutcome {
    pub replicate: usize,
    pub result: Result<LandscapeFeatures>,
}

/// Seed of the information-content tour for a replicate.
pub fn tour_seed(seed: u64, replicate: usize) -> u64 {
    derive_seed(derive_seed(seed, 0x1C), replicate as u64)
}

/// Bootstrap plan with its own stream derived from `seed`.
pub fn bootstrap_plan(subsample_size: usize, repetitions: usize, seed: u64) -> BootstrapPlan {
    BootstrapPlan {
        subsample_size,
        repetitions,
        seed: derive_seed(seed, 0xB5),
    }
}

/// Features of the full sample followed by one row per bootstrap replicate.
/// Replicates run in parallel; a failing replicate does not stop the others.
pub fn replicate_features(
    sample: &MinimizationSample,
    bootstrap: Option<&BootstrapPlan>,
    seed: u64,
) -> Result<Vec<ReplicateOutcome>> {
    let subsets = match bootstrap {
        Some(plan) => bootstrap_indices(sample.len(), plan)?,
        None => Vec::new(),
    };
    let full = ReplicateOutcome {
        replicate: 0,
        result: compute_all(sample, &IcSettings::with_seed(tour_seed(seed, 0))),
    };
    let reps: Vec<ReplicateOutcome> = subsets
        .par_iter()
        .enumerate()
        .map(|(r, rows)| {
            let replicate = r + 1;
            let result = sample
                .select(rows)
                .and_then(|s| compute_all(&s, &IcSettings::with_seed(tour_seed(seed, replicate))));
            ReplicateOutcome { replicate, result }
        })
        .collect();
    Ok(std::iter::once(full).chain(reps).collect())
}
