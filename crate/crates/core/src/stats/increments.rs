use crate::error::{Error, Result};
use crate::path::Path;

/// `(pi/2)^{1/4}`: maps KPZ temporal increments at lag `eps` to unit variance after dividing by `eps^{1/4}`.
pub const STANDARDIZING_FACTOR: f64 = 1.119_515_134_920_247_7;

/// Raw increments `path(t + eps) - path(t)` across a family of paths.
pub fn increments_at(paths: &[Path], t: f64, epsilon: f64) -> Result<Vec<f64>> {
    if paths.is_empty() {
        return Err(Error::Insufficient("no paths".into()));
    }
    paths
        .iter()
        .map(|p| {
            let lag = p.lag_steps(epsilon)?;
            let i = p.index_of(t)?;
            let j = i + lag;
            if j >= p.len() {
                return Err(Error::OutOfRange(format!("t + eps = {} beyond path end {}", t + epsilon, p.t_last())));
            }
            Ok(p.values()[j] - p.values()[i])
        })
        .collect()
}

/// `(pi/2)^{1/4} eps^{-1/4} [path(t + eps) - path(t)]` for each path.
pub fn standardized_increments(paths: &[Path], t: f64, epsilon: f64) -> Result<Vec<f64>> {
    let c = STANDARDIZING_FACTOR * epsilon.powf(-0.25);
    Ok(increments_at(paths, t, epsilon)?.into_iter().map(|d| c * d).collect())
}
