//! Sample-path estimators for scalar time series.

mod exceptional;
mod holder;
mod increments;
mod ks;
mod profile;
mod variation;

use std::f64::consts::PI;

pub use exceptional::{box_dimension, exceptional_set, exceptional_sets, membership_scales, BoxCountResult, ExceptionalSet};
pub use holder::{holder_coefficient, HOLDER_MAX_POINTS};
pub use increments::{increments_at, standardized_increments, STANDARDIZING_FACTOR};
pub use ks::{ks_normality, ks_two_sample, normal_cdf, KsResult, KS_COEFFICIENT_01};
pub use profile::{lil_profile, moc_profile, ProfileKind, ScalingProfile, DEFAULT_MIN_STEPS};
pub use variation::{alpha_variation, VariationResult};

/// Limit of the quartic variation per unit time: `6 / pi`.
pub const QUARTIC_VARIATION_RATE: f64 = 6.0 / PI;

/// LIL and modulus-of-continuity constant `(8/pi)^{1/4}`.
pub const LIL_CONSTANT: f64 = 1.263_237_555_492_129_3;

/// Sample mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance and the standard error of that estimate,
/// `sqrt((m4 - s^4 (n-3)/(n-1)) / n)` with `m4` the fourth central moment.
pub fn variance_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 4 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let v = (m4 - var * var * (n - 3.0) / (n - 1.0)) / n;
    (var, v.max(0.0).sqrt())
}
