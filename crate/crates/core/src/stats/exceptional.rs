use super::LIL_CONSTANT;
use crate::error::{Error, Result};
use crate::path::Path;

/// Finite-resolution surrogate of the set of times with exceptionally large increments.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalSet {
    pub alpha: f64,
    pub resolution: u32,
    pub interval: (f64, f64),
    /// Members as offsets `k` in units of `2^{-resolution}` from the interval start.
    pub members: Vec<u64>,
}

impl ExceptionalSet {
    pub fn times(&self) -> Vec<f64> {
        let h = (-(self.resolution as f64)).exp2();
        self.members.iter().map(|k| self.interval.0 + *k as f64 * h).collect()
    }

    pub fn is_subset_of(&self, other: &ExceptionalSet) -> bool {
        // both member lists are sorted
        let mut j = 0;
        for k in &self.members {
            while j < other.members.len() && other.members[j] < *k {
                j += 1;
            }
            if j == other.members.len() || other.members[j] != *k {
                return false;
            }
        }
        true
    }
}

/// Dyadic levels `ceil(j/2) ..= j` probed for membership at resolution `j`.
pub fn membership_scales(resolution: u32) -> std::ops::RangeInclusive<u32> {
    resolution.div_ceil(2).max(1)..=resolution
}

/// Per-point statistic `max_delta |path(t + delta) - path(t)| / (delta^{1/4} sqrt(log(1/delta)))`
/// for `t = a + k 2^{-j}` and dyadic `delta in [2^{-j}, 2^{-ceil(j/2)}]`.
fn membership_statistic(path: &Path, interval: (f64, f64), resolution: u32) -> Result<Vec<f64>> {
    let (a, b) = path.window(interval.0, interval.1)?;
    let h = (-(resolution as f64)).exp2();
    let step = path
        .lag_steps(h)
        .map_err(|_| Error::OutOfRange(format!("resolution {resolution} is finer than the path step {}", path.dt())))?;
    let v = path.values();
    let count = (b - a) / step + 1;
    let mut best = vec![0.0f64; count];
    for level in membership_scales(resolution) {
        let delta = (-(level as f64)).exp2();
        let lag = step << (resolution - level);
        if b + lag >= v.len() {
            return Err(Error::OutOfRange(format!(
                "path must extend to {} for delta = {delta}",
                path.t(b) + delta
            )));
        }
        let norm = 1.0 / (delta.powf(0.25) * (1.0 / delta).ln().sqrt());
        for (k, slot) in best.iter_mut().enumerate() {
            let i = a + k * step;
            *slot = slot.max((v[i + lag] - v[i]).abs() * norm);
        }
    }
    Ok(best)
}

/// Grid times `t` in `interval` at spacing `2^{-resolution}` whose membership statistic
/// reaches `alpha (8/pi)^{1/4}`.
pub fn exceptional_set(path: &Path, alpha: f64, resolution: u32, interval: (f64, f64)) -> Result<ExceptionalSet> {
    Ok(exceptional_sets(path, &[alpha], resolution, interval)?.pop().expect("one alpha"))
}

/// Several thresholds sharing one pass over the path.
pub fn exceptional_sets(path: &Path, alphas: &[f64], resolution: u32, interval: (f64, f64)) -> Result<Vec<ExceptionalSet>> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be at least 1".into()));
    }
    if alphas.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    let stat = membership_statistic(path, interval, resolution)?;
    Ok(alphas
        .iter()
        .map(|&alpha| {
            let threshold = alpha * LIL_CONSTANT;
            ExceptionalSet {
                alpha,
                resolution,
                interval,
                members: (0..stat.len() as u64).filter(|&k| stat[k as usize] >= threshold).collect(),
            }
        })
        .collect())
}

/// Occupied-box counts per scale and the least-squares slope of log count against log(1/scale).
#[derive(Debug, Clone, PartialEq)]
pub struct BoxCountResult {
    pub alpha: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    pub slope: f64,
    pub residual: f64,
    pub empty: bool,
}

/// Box-counting dimension of `set` over the given dyadic box sizes.
pub fn box_dimension(set: &ExceptionalSet, levels: &[u32]) -> Result<BoxCountResult> {
    if levels.len() < 4 {
        return Err(Error::Insufficient(format!("box counting needs at least 4 scales, got {}", levels.len())));
    }
    let (lo, hi) = (*levels.iter().min().unwrap(), *levels.iter().max().unwrap());
    if ((hi - lo) as f64) * 2f64.log10() < 2.0 - 1e-9 {
        return Err(Error::Insufficient("box scales must span at least two decades".into()));
    }
    if hi > set.resolution {
        return Err(Error::InvalidArgument(format!("box level {hi} is finer than the set resolution {}", set.resolution)));
    }
    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let width = set.interval.1 - set.interval.0;
    let scales: Vec<f64> = sorted.iter().map(|l| (-(*l as f64)).exp2()).collect();
    if set.members.is_empty() {
        return Ok(BoxCountResult { alpha: set.alpha, scales, counts: vec![0; sorted.len()], slope: 0.0, residual: 0.0, empty: true });
    }
    let mut counts = Vec::with_capacity(sorted.len());
    for (&level, &scale) in sorted.iter().zip(&scales) {
        let last_box = ((width / scale).ceil() as u64).max(1) - 1;
        let shift = set.resolution - level;
        let mut count = 0u64;
        let mut prev = None;
        for &k in &set.members {
            let bx = (k >> shift).min(last_box);
            if prev != Some(bx) {
                count += 1;
                prev = Some(bx);
            }
        }
        counts.push(count);
    }
    let xs: Vec<f64> = scales.iter().map(|s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (*c as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(BoxCountResult { alpha: set.alpha, scales, counts, slope, residual, empty: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_set(resolution: u32) -> ExceptionalSet {
        ExceptionalSet {
            alpha: 0.0,
            resolution,
            interval: (1.0, 2.0),
            members: (0..=(1u64 << resolution)).collect(),
        }
    }

    #[test]
    fn full_interval_has_dimension_one() {
        let r = box_dimension(&full_set(16), &(6..=16).collect::<Vec<_>>()).unwrap();
        assert!((r.slope - 1.0).abs() < 0.02, "{r:?}");
        assert!(r.counts.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn single_point_has_dimension_zero() {
        let set = ExceptionalSet { alpha: 0.5, resolution: 16, interval: (1.0, 2.0), members: vec![12345] };
        let r = box_dimension(&set, &(6..=16).collect::<Vec<_>>()).unwrap();
        assert!(r.slope.abs() < 0.02);
    }

    #[test]
    fn box_errors() {
        let set = full_set(12);
        assert!(box_dimension(&set, &[4, 6, 8]).is_err());
        assert!(box_dimension(&set, &[4, 5, 6, 7]).is_err());
        assert!(box_dimension(&set, &[4, 6, 8, 14]).is_err());
        let empty = ExceptionalSet { members: vec![], ..set };
        let r = box_dimension(&empty, &[2, 4, 6, 8, 10]).unwrap();
        assert!(r.empty && r.slope == 0.0);
    }

    #[test]
    fn thresholds_and_nesting() {
        let p = Path::from_fn(0.0, (-12f64).exp2(), 3 << 12, |u| (u * 300.0).sin() * 0.2 + (u * 17.0).cos()).unwrap();
        let sets = exceptional_sets(&p, &[1e-12, 0.3, 0.5, 2.0], 12, (1.0, 2.0)).unwrap();
        assert_eq!(sets[0].members.len(), (1 << 12) + 1);
        assert!(sets[2].is_subset_of(&sets[1]));
        assert!(sets[1].is_subset_of(&sets[0]));
        let smooth = Path::from_fn(0.0, (-12f64).exp2(), 3 << 12, |u| 0.001 * u).unwrap();
        assert!(exceptional_set(&smooth, 1.05, 12, (1.0, 2.0)).unwrap().members.is_empty());
        assert!(exceptional_set(&p, 0.5, 13, (1.0, 2.0)).is_err());
        let short = Path::from_fn(0.0, (-12f64).exp2(), 2 << 12, |u| u).unwrap();
        assert!(exceptional_set(&short, 0.5, 12, (1.0, 2.0)).is_err());
    }

    #[test]
    fn times_round_trip() {
        let set = ExceptionalSet { alpha: 0.5, resolution: 4, interval: (1.0, 2.0), members: vec![0, 3, 16] };
        assert_eq!(set.times(), vec![1.0, 1.1875, 2.0]);
    }
}
