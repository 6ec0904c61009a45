//! Ground truth and statistical validation.
//!
//! - [`exact`]: maximum matching for general and bipartite graphs.
//! - [`reference`]: the level structure rebuilt from scratch.
//! - [`audit`]: degrees of eliminator-filtered subgraphs.
//! - [`sampling`]: greedy matching under one-sided vertex sampling.
//! - [`analysis`]: slice augmentation, pivot level, 3-augmentable edges.
//!
//! Statistical gates compare a Monte Carlo mean against a bound with a
//! three-standard-error allowance, never tighter.

use serde::Serialize;

pub mod analysis;
pub mod audit;
pub mod exact;
pub mod reference;
pub mod sampling;

pub use analysis::{
    clique_plus_matching, count_3_augmentable, find_pivot_level, partition_bound_coefficient,
    three_augmentable, validate_partition_augmentation, AugmentationReport, GadgetFamily, PivotLevel,
};
pub use audit::{audit_sparsification, AuditReport, ThresholdAudit};
pub use exact::{
    augmenting_path, max_matching_bipartite, max_matching_exact, max_matching_warm, ExactMatchingResult,
    DEFAULT_ORACLE_LIMIT,
};
pub use reference::{diff_pipeline, static_reference, static_reference_of, ReferenceLevel, ReferenceState};
pub use sampling::{validate_vertex_sampling, SamplingInstance};

/// Standard errors allowed below a lower bound.
pub const SE_ALLOWANCE: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub trials: usize,
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Estimate {
        let k = samples.len();
        if k == 0 {
            return Estimate { trials: 0, mean: 0.0, std_err: 0.0 };
        }
        let mean = samples.iter().sum::<f64>() / k as f64;
        let std_err = if k > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        } else {
            0.0
        };
        Estimate { trials: k, mean, std_err }
    }
}

/// A Monte Carlo mean checked against a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub estimate: Estimate,
    pub bound: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(estimate: Estimate, bound: f64) -> BoundCheck {
        let pass = estimate.mean >= bound - SE_ALLOWANCE * estimate.std_err;
        BoundCheck { estimate, bound, pass }
    }
}
