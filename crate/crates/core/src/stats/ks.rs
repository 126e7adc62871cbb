use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Asymptotic Kolmogorov-Smirnov critical coefficient at significance 0.01.
pub const KS_COEFFICIENT_01: f64 = 1.63;

const MIN_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub threshold: f64,
    pub n: usize,
}

impl KsResult {
    pub fn passes(&self) -> bool {
        self.statistic < self.threshold
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("KS input contains NaN".into()));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample distance to the standard normal, threshold `1.63 / sqrt(N)`.
pub fn ks_normality(samples: &[f64]) -> Result<KsResult> {
    let n = samples.len();
    if n < MIN_SAMPLES {
        return Err(Error::Insufficient(format!("KS test needs at least {MIN_SAMPLES} samples, got {n}")));
    }
    let v = sorted(samples)?;
    let nf = n as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < n {
        // ties: advance over equal values so the ECDF jump is taken once
        let mut j = i;
        while j + 1 < n && v[j + 1] == v[i] {
            j += 1;
        }
        let f = normal_cdf(v[i]);
        d = d.max((f - i as f64 / nf).abs()).max(((j + 1) as f64 / nf - f).abs());
        i = j + 1;
    }
    Ok(KsResult { statistic: d, threshold: KS_COEFFICIENT_01 / nf.sqrt(), n })
}

/// Two-sample distance, threshold `1.63 sqrt((n + m) / (n m))`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.len() < MIN_SAMPLES || b.len() < MIN_SAMPLES {
        return Err(Error::Insufficient("two-sample KS needs at least 50 samples per side".into()));
    }
    let (x, y) = (sorted(a)?, sorted(b)?);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(KsResult {
        statistic: d,
        threshold: KS_COEFFICIENT_01 * ((n + m) / (n * m)).sqrt(),
        n: x.len() + y.len(),
    })
}
