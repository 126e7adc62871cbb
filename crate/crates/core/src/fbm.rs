//! Exact fractional Brownian motion: covariance, Cholesky and circulant-embedding
//! samplers, and the `(2/pi)^{1/4}` scale linking fBm(1/4) to the KPZ temporal process.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::noise::{fill_standard_normal, KeyDomain};
use crate::path::Path;

/// `(2/pi)^{1/4}`: the temporal process at `x = 0` behaves like this multiple of fBm(1/4).
pub const KPZ_FBM_SCALE: f64 = 0.893_243_841_738_002_3;

/// Hurst parameter of the KPZ temporal process.
pub const KPZ_HURST: f64 = 0.25;

/// Largest number of times accepted by the Cholesky sampler.
pub const CHOLESKY_MAX_TIMES: usize = 8192;

/// Grids up to this many points default to the Cholesky sampler.
pub const CHOLESKY_DEFAULT_LIMIT: usize = 4096;

/// Largest circulant path length (number of increments).
pub const CIRCULANT_MAX_N: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbmMethod {
    Cholesky,
    Circulant,
}

/// What to sample: Hurst index, sample times and the keyed random stream.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmSpec {
    pub hurst: f64,
    pub times: Vec<f64>,
    pub method: FbmMethod,
    pub seed: u64,
    pub stream: u64,
}

fn check_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("Hurst parameter must lie in (0, 1), got {h}")))
    }
}

/// `Cov(X_s, X_t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2`.
pub fn fbm_covariance(hurst: f64, s: f64, t: f64) -> Result<f64> {
    check_hurst(hurst)?;
    if !(s >= 0.0 && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("fBm times must be nonnegative (got {s}, {t})")));
    }
    let h2 = 2.0 * hurst;
    Ok(0.5 * (s.powf(h2) + t.powf(h2) - (t - s).abs().powf(h2)))
}

/// Autocovariance of unit-spacing fractional Gaussian noise at lag `k`.
fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Cholesky factor of the covariance at a fixed set of times, reusable across samples.
#[derive(Debug, Clone)]
pub struct CholeskySampler {
    times: Vec<f64>,
    positive: Vec<usize>,
    factor: DMatrix<f64>,
}

impl CholeskySampler {
    pub fn new(hurst: f64, times: &[f64]) -> Result<Self> {
        check_hurst(hurst)?;
        if times.is_empty() || times.len() > CHOLESKY_MAX_TIMES {
            return Err(Error::InvalidArgument(format!(
                "Cholesky sampler takes 1..={CHOLESKY_MAX_TIMES} times, got {}",
                times.len()
            )));
        }
        if times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("times must be nonnegative and strictly increasing".into()));
        }
        // X_0 = 0 exactly, so t = 0 is kept out of the factorization.
        let positive: Vec<usize> = (0..times.len()).filter(|&i| times[i] > 0.0).collect();
        let m = positive.len();
        let cov = DMatrix::from_fn(m, m, |a, b| {
            fbm_covariance(hurst, times[positive[a]], times[positive[b]]).unwrap_or(f64::NAN)
        });
        let factor = if m == 0 {
            DMatrix::zeros(0, 0)
        } else {
            cov.cholesky().ok_or(Error::NotPositiveDefinite)?.unpack()
        };
        Ok(CholeskySampler { times: times.to_vec(), positive, factor })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Values at the sampler's times for stream `(seed, stream)`.
    pub fn sample(&self, seed: u64, stream: u64) -> Vec<f64> {
        let m = self.positive.len();
        let mut z = vec![0.0; m];
        fill_standard_normal(KeyDomain::FbmCholesky, seed, stream, 0, &mut z);
        let x = &self.factor * DVector::from_vec(z);
        let mut out = vec![0.0; self.times.len()];
        for (k, &i) in self.positive.iter().enumerate() {
            out[i] = x[k];
        }
        out
    }
}

/// Exact sample at arbitrary increasing times by Cholesky factorization.
pub fn sample_fbm_cholesky(spec: &FbmSpec) -> Result<Vec<f64>> {
    Ok(CholeskySampler::new(spec.hurst, &spec.times)?.sample(spec.seed, spec.stream))
}

/// Davies-Harte circulant embedding of fractional Gaussian noise.
///
/// The `2n x 2n` circulant extension of the fGn covariance has eigenvalues
/// `lambda_j = FFT(c)_j`; with `Z = Z1 + i Z2` standard complex Gaussian, the
/// real and imaginary parts of `FFT(sqrt(lambda / 2n) Z)` restricted to the first
/// `n` entries are two independent exact fGn samples.
pub struct CirculantSampler {
    hurst: f64,
    n: usize,
    dt: f64,
    sqrt_eigen: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CirculantSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantSampler").field("hurst", &self.hurst).field("n", &self.n).field("dt", &self.dt).finish()
    }
}

impl CirculantSampler {
    pub fn new(hurst: f64, n: usize, dt: f64) -> Result<Self> {
        check_hurst(hurst)?;
        if !n.is_power_of_two() || n > CIRCULANT_MAX_N {
            return Err(Error::InvalidArgument(format!("circulant length must be a power of two <= 2^26, got {n}")));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        let m = 2 * n;
        let mut row: Vec<Complex64> = (0..m)
            .map(|j| {
                let lag = if j <= n { j } else { m - j };
                Complex64::new(fgn_autocovariance(hurst, lag), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);
        let peak = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
        let mut sqrt_eigen = Vec::with_capacity(m);
        for c in &row {
            let lambda = c.re;
            if lambda < -1e-10 * peak {
                return Err(Error::NegativeEigenvalue(lambda));
            }
            sqrt_eigen.push((lambda.max(0.0) / m as f64).sqrt());
        }
        Ok(CirculantSampler { hurst, n, dt, sqrt_eigen, fft })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Two independent fBm paths on `0, dt, ..., n dt` from one keyed stream.
    pub fn sample_pair(&self, seed: u64, stream: u64) -> (Path, Path) {
        let m = 2 * self.n;
        let mut z = vec![0.0; 2 * m];
        fill_standard_normal(KeyDomain::FbmCirculant, seed, stream, 0, &mut z);
        let mut buf: Vec<Complex64> = z
            .chunks_exact(2)
            .zip(&self.sqrt_eigen)
            .map(|(g, s)| Complex64::new(s * g[0], s * g[1]))
            .collect();
        drop(z);
        self.fft.process(&mut buf);
        let scale = self.dt.powf(self.hurst);
        let mut re = Vec::with_capacity(self.n + 1);
        let mut im = Vec::with_capacity(self.n + 1);
        let (mut a, mut b) = (0.0, 0.0);
        re.push(0.0);
        im.push(0.0);
        for c in &buf[..self.n] {
            a += scale * c.re;
            b += scale * c.im;
            re.push(a);
            im.push(b);
        }
        let p = |v| Path::new(0.0, self.dt, v).expect("finite by construction");
        (p(re), p(im))
    }

    /// One fBm path (the real part of [`sample_pair`](Self::sample_pair)).
    pub fn sample(&self, seed: u64, stream: u64) -> Path {
        self.sample_pair(seed, stream).0
    }
}

/// Exact fBm on `0, dt, ..., n dt` by circulant embedding.
pub fn sample_fbm_circulant(hurst: f64, n: usize, dt: f64, seed: u64, stream: u64) -> Result<Path> {
    Ok(CirculantSampler::new(hurst, n, dt)?.sample(seed, stream))
}

/// fBm on the uniform grid `0, dt, ..., n dt`, choosing Cholesky for small grids.
pub fn sample_fbm_uniform(hurst: f64, n: usize, dt: f64, seed: u64, stream: u64) -> Result<Path> {
    if n + 1 <= CHOLESKY_DEFAULT_LIMIT {
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        let spec = FbmSpec { hurst, times, method: FbmMethod::Cholesky, seed, stream };
        Path::new(0.0, dt, sample_fbm_cholesky(&spec)?)
    } else {
        sample_fbm_circulant(hurst, n, dt, seed, stream)
    }
}

/// Multiplies a standard fBm(1/4) path by `(2/pi)^{1/4}`.
pub fn rescale_to_kpz(path: &Path) -> Path {
    path.scaled(KPZ_FBM_SCALE)
}

/// Increment variance of the rescaled process at lag `eps`: `sqrt(2/pi) sqrt(eps)`.
pub fn kpz_increment_variance(eps: f64) -> f64 {
    (2.0 / PI).sqrt() * eps.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_values() {
        assert!((fbm_covariance(0.5, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((fbm_covariance(0.25, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((fbm_covariance(0.25, 1.0, 2.0).unwrap() - 0.707_106_8).abs() < 1e-7);
        assert!(fbm_covariance(1.0, 1.0, 2.0).is_err());
        assert!(fbm_covariance(0.0, 1.0, 2.0).is_err());
        assert!(fbm_covariance(0.25, -1.0, 2.0).is_err());
        assert!((KPZ_FBM_SCALE - (2.0 / PI).powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn cholesky_special_times() {
        let zero = CholeskySampler::new(0.25, &[0.0]).unwrap();
        assert_eq!(zero.sample(1, 2), vec![0.0]);
        let with_zero = CholeskySampler::new(0.25, &[0.0, 0.5, 1.0]).unwrap().sample(4, 0);
        assert_eq!(with_zero[0], 0.0);
        assert!(CholeskySampler::new(0.25, &[1.0, 0.5]).is_err());
        assert!(CholeskySampler::new(0.25, &[]).is_err());
    }

    #[test]
    fn single_time_is_standard_normal() {
        let s = CholeskySampler::new(0.25, &[1.0]).unwrap();
        let xs: Vec<f64> = (0..4000).map(|k| s.sample(9, k)[0]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!(mean.abs() < 4.0 / (xs.len() as f64).sqrt());
        assert!((var - 1.0).abs() < 4.0 * (2.0 / xs.len() as f64).sqrt());
    }

    #[test]
    fn circulant_rejects_bad_input() {
        assert!(CirculantSampler::new(0.25, 1000, 0.1).is_err());
        assert!(CirculantSampler::new(1.5, 1024, 0.1).is_err());
        assert!(CirculantSampler::new(0.25, 1024, 0.0).is_err());
    }

    #[test]
    fn circulant_increment_variance() {
        let dt = 1.0 / 1024.0;
        let path = sample_fbm_circulant(0.25, 1 << 20, dt, 3, 0).unwrap();
        let inc: Vec<f64> = path.values().windows(2).map(|w| w[1] - w[0]).collect();
        let var = inc.iter().map(|d| d * d).sum::<f64>() / inc.len() as f64;
        assert!((var / dt.powf(0.5) - 1.0).abs() < 0.01, "{}", var / dt.sqrt());
    }

    #[test]
    fn brownian_case_is_uncorrelated() {
        let n = 1 << 16;
        let path = sample_fbm_circulant(0.5, n, 1.0, 8, 1).unwrap();
        let inc: Vec<f64> = path.values().windows(2).map(|w| w[1] - w[0]).collect();
        let var = inc.iter().map(|d| d * d).sum::<f64>() / n as f64;
        let lag1 = inc.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1) as f64 / var;
        assert!(lag1.abs() < 4.0 / (n as f64).sqrt(), "{lag1}");
    }

    #[test]
    fn pair_components_are_independent() {
        let s = CirculantSampler::new(0.25, 1 << 12, 1.0, ).unwrap();
        let mut cross = 0.0;
        let mut norm = 0.0;
        for k in 0..64 {
            let (a, b) = s.sample_pair(5, k);
            let da: Vec<f64> = a.values().windows(2).map(|w| w[1] - w[0]).collect();
            let db: Vec<f64> = b.values().windows(2).map(|w| w[1] - w[0]).collect();
            cross += da.iter().zip(&db).map(|(x, y)| x * y).sum::<f64>();
            norm += da.len() as f64;
        }
        // each product has unit variance
        assert!((cross / norm).abs() < 4.0 / norm.sqrt());
    }

    #[test]
    fn rescale_round_trip() {
        let p = Path::from_fn(0.0, 0.1, 10, |t| t.sin()).unwrap();
        let back = rescale_to_kpz(&p).scaled(1.0 / KPZ_FBM_SCALE);
        for (a, b) in back.values().iter().zip(p.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        let zero = Path::new(0.0, 1.0, vec![0.0; 4]).unwrap();
        assert_eq!(rescale_to_kpz(&zero), zero);
        assert!((kpz_increment_variance(1.0) - KPZ_FBM_SCALE.powi(2)).abs() < 1e-15);
        assert!((kpz_increment_variance(1.0) - 0.797_885).abs() < 1e-6);
    }
}
