use std::collections::VecDeque;

use super::LIL_CONSTANT;
use crate::error::{Error, Result};
use crate::path::Path;

/// Default smallest lag, in path steps, accepted by the scaling profiles.
pub const DEFAULT_MIN_STEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Lil,
    Moc,
}

/// Finite-scale approximation of a limsup: one statistic per dyadic level `eps_j = 2^{-j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingProfile {
    pub kind: ProfileKind,
    pub levels: Vec<u32>,
    pub epsilons: Vec<f64>,
    pub statistics: Vec<f64>,
    pub target: f64,
}

impl ScalingProfile {
    pub fn last(&self) -> Option<f64> {
        self.statistics.last().copied()
    }
}

fn dyadic_lag(path: &Path, level: u32, min_steps: usize) -> Result<usize> {
    let eps = (-(level as f64)).exp2();
    let lag = path
        .lag_steps(eps)
        .map_err(|_| Error::OutOfRange(format!("level {level} (eps = {eps}) is finer than the path resolution {}", path.dt())))?;
    if lag < min_steps.max(1) {
        return Err(Error::OutOfRange(format!(
            "level {level} spans {lag} path steps, fewer than the minimum {min_steps}"
        )));
    }
    Ok(lag)
}

/// Running maximum over levels `j <= J` of
/// `(path(t + eps_j) - path(t)) / (eps_j^{1/4} sqrt(log log(1/eps_j)))`.
///
/// Levels with `log log(1/eps) <= 0` are skipped. Every remaining level must
/// span at least `min_steps` path steps.
pub fn lil_profile(path: &Path, t: f64, max_depth: u32, min_steps: usize) -> Result<ScalingProfile> {
    let i0 = path.index_of(t)?;
    let values = path.values();
    let mut profile = ScalingProfile {
        kind: ProfileKind::Lil,
        levels: Vec::new(),
        epsilons: Vec::new(),
        statistics: Vec::new(),
        target: LIL_CONSTANT,
    };
    let mut running = f64::NEG_INFINITY;
    for level in 1..=max_depth {
        let eps = (-(level as f64)).exp2();
        let loglog = (1.0 / eps).ln().ln();
        if loglog <= 0.0 {
            continue;
        }
        let lag = dyadic_lag(path, level, min_steps)?;
        let j = i0 + lag;
        if j >= values.len() {
            return Err(Error::OutOfRange(format!("t + eps = {} beyond path end", t + eps)));
        }
        let stat = (values[j] - values[i0]) / (eps.powf(0.25) * loglog.sqrt());
        running = running.max(stat);
        profile.levels.push(level);
        profile.epsilons.push(eps);
        profile.statistics.push(running);
    }
    if profile.levels.is_empty() {
        return Err(Error::InvalidArgument(format!("max_depth {max_depth} leaves no admissible level")));
    }
    Ok(profile)
}

/// Largest `|path(u) - path(v)|` over grid pairs in `[a, b]` with `0 < u - v <= window` steps,
/// using monotone deques for the sliding max and min.
fn max_oscillation(values: &[f64], window: usize) -> f64 {
    let n = values.len();
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    // For each right end r, compare against the extremes of values[r-window..r].
    for r in 0..n {
        if r > 0 {
            let l = r - 1;
            while maxq.back().is_some_and(|&k| values[k] <= values[l]) {
                maxq.pop_back();
            }
            maxq.push_back(l);
            while minq.back().is_some_and(|&k| values[k] >= values[l]) {
                minq.pop_back();
            }
            minq.push_back(l);
        }
        while maxq.front().is_some_and(|&k| k + window < r) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&k| k + window < r) {
            minq.pop_front();
        }
        if let (Some(&hi), Some(&lo)) = (maxq.front(), minq.front()) {
            best = best.max(values[hi] - values[r]).max(values[r] - values[lo]);
        }
    }
    best
}

/// Per level, `sup |path(u) - path(v)|` over `a <= v < u <= b`, `u - v <= eps_j`,
/// divided by `eps_j^{1/4} sqrt(log(1/eps_j))`.
pub fn moc_profile(path: &Path, interval: (f64, f64), levels: &[u32], min_steps: usize) -> Result<ScalingProfile> {
    let (a, b) = path.window(interval.0, interval.1)?;
    if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("levels must be nonempty and strictly increasing".into()));
    }
    let values = &path.values()[a..=b];
    let mut profile = ScalingProfile {
        kind: ProfileKind::Moc,
        levels: Vec::new(),
        epsilons: Vec::new(),
        statistics: Vec::new(),
        target: LIL_CONSTANT,
    };
    for &level in levels {
        if level == 0 {
            return Err(Error::InvalidArgument("level 0 has log(1/eps) = 0".into()));
        }
        let eps = (-(level as f64)).exp2();
        let lag = dyadic_lag(path, level, min_steps)?;
        let sup = max_oscillation(values, lag);
        profile.levels.push(level);
        profile.epsilons.push(eps);
        profile.statistics.push(sup / (eps.powf(0.25) * (1.0 / eps).ln().sqrt()));
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_oscillation(values: &[f64], window: usize) -> f64 {
        let mut best = 0.0f64;
        for i in 0..values.len() {
            for j in i + 1..values.len().min(i + window + 1) {
                best = best.max((values[j] - values[i]).abs());
            }
        }
        best
    }

    proptest! {
        #[test]
        fn deque_matches_brute_force(vals in prop::collection::vec(-10.0f64..10.0, 2..200), window in 1usize..40) {
            prop_assert_eq!(max_oscillation(&vals, window), brute_oscillation(&vals, window));
        }

        #[test]
        fn shift_invariance(c in -100.0f64..100.0) {
            let p = Path::from_fn(0.0, 1.0 / 1024.0, 2048, |t| (t * 91.0).sin() + (t * 7.0).cos()).unwrap();
            let q = p.shifted(c);
            let lil_p = lil_profile(&p, 1.0, 6, 16).unwrap();
            let lil_q = lil_profile(&q, 1.0, 6, 16).unwrap();
            for (x, y) in lil_p.statistics.iter().zip(&lil_q.statistics) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + c.abs()));
            }
            let moc_p = moc_profile(&p, (1.0, 2.0), &[2, 4, 6], 16).unwrap();
            let moc_q = moc_profile(&q, (1.0, 2.0), &[2, 4, 6], 16).unwrap();
            for (x, y) in moc_p.statistics.iter().zip(&moc_q.statistics) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + c.abs()));
            }
        }
    }

    #[test]
    fn smooth_path_lil_decays() {
        let p = Path::from_fn(0.0, (-20f64).exp2(), 1 << 21, |u| u).unwrap();
        let prof = lil_profile(&p, 1.0, 16, 16).unwrap();
        assert_eq!(prof.levels[0], 2);
        // running max is attained at the coarsest level; per-level terms vanish like eps^{3/4}
        let per_level = |j: u32| {
            let eps = (-(j as f64)).exp2();
            eps.powf(0.75) / (1.0 / eps).ln().ln().sqrt()
        };
        assert!(per_level(16) < 1e-3 && per_level(16) < per_level(8));
        assert!(prof.statistics.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn zero_path_lil_is_zero() {
        let p = Path::new(0.0, 1.0 / 4096.0, vec![0.0; 8193]).unwrap();
        let prof = lil_profile(&p, 1.0, 8, 16).unwrap();
        assert!(prof.statistics.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn lipschitz_moc_vanishes() {
        let p = Path::from_fn(0.0, 1.0 / 65536.0, 2 * 65536, |u| 3.0 * u).unwrap();
        let prof = moc_profile(&p, (1.0, 2.0), &[4, 8, 12], 16).unwrap();
        for (eps, s) in prof.epsilons.iter().zip(&prof.statistics) {
            let want = 3.0 * eps / (eps.powf(0.25) * (1.0 / eps).ln().sqrt());
            assert!((s - want).abs() < 1e-9);
        }
        assert!(prof.statistics.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn resolution_errors() {
        let p = Path::from_fn(0.0, 1.0 / 256.0, 512, |u| u).unwrap();
        assert!(lil_profile(&p, 1.0, 4, 16).is_ok());
        assert!(matches!(lil_profile(&p, 1.0, 5, 16), Err(Error::OutOfRange(_))));
        assert!(lil_profile(&p, 1.0, 8, 1).is_ok());
        assert!(matches!(lil_profile(&p, 1.0, 9, 1), Err(Error::OutOfRange(_))));
        assert!(moc_profile(&p, (1.0, 2.5), &[2], 16).is_err());
        assert!(moc_profile(&p, (1.0, 2.0), &[4, 3], 16).is_err());
    }
}
