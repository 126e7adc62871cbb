//! Discrete space-time white noise.
//!
//! Cell `(n, i)` of a realization holds `dW_{n,i}`, the white-noise mass of
//! the cell `[t_n, t_{n+1}) x [x_i, x_i + dx)`, i.e. a centered Gaussian with
//! variance `dt dx`. Any rescaling needed by a time-stepping scheme happens
//! in the solver.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Key domains keep the noise, Brownian initial data and fBm samplers on
/// disjoint ChaCha keys even when they share a user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum KeyDomain {
    SpaceTimeNoise = 0x5348_455f_6e6f_6973,
    BrownianInitial = 0x4252_4f57_4e5f_4943,
    FbmCholesky = 0x4642_4d5f_6368_6f6c,
    FbmCirculant = 0x4642_4d5f_6369_7263,
}

/// u32 words reserved per generated value. The ziggurat consumes one u64
/// (two words) per attempt and rejects ~1% of attempts, so a row of `len`
/// values never reaches the next row's first word.
const WORDS_PER_VALUE: u128 = 4;

/// Generator positioned at block `block` of the keyed stream `(domain, seed, stream)`.
pub(crate) fn keyed_rng(domain: KeyDomain, seed: u64, stream: u64, block: u64, block_len: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng.set_word_pos(block as u128 * block_len as u128 * WORDS_PER_VALUE);
    rng
}

/// Fills `out` with standard normals from block `block` of a keyed stream.
pub(crate) fn fill_standard_normal(domain: KeyDomain, seed: u64, stream: u64, block: u64, out: &mut [f64]) {
    let mut rng = keyed_rng(domain, seed, stream, block, out.len());
    for v in out.iter_mut() {
        *v = StandardNormal.sample(&mut rng);
    }
}

/// Anything that can supply rows of white-noise increments on a grid.
pub trait NoiseSource: Sync {
    fn grid(&self) -> &GridSpec;

    /// Writes row `n` (time step `t_n -> t_{n+1}`) into `out`, which has length `nx`.
    fn fill_row(&self, n: usize, out: &mut [f64]);
}

/// Seeded, counter-addressed noise realization.
///
/// Rows are generated on demand: row `n` depends only on `(seed, stream_id, n)`,
/// so any subset of rows can be produced in any order or on any thread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRealization {
    grid: GridSpec,
    seed: u64,
    stream_id: u64,
}

/// Creates the realization for `(grid, seed, stream_id)`.
pub fn sample_noise(grid: &GridSpec, seed: u64, stream_id: u64) -> NoiseRealization {
    NoiseRealization { grid: *grid, seed, stream_id }
}

impl NoiseRealization {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Materializes the full `nt x nx` array.
    pub fn increments(&self) -> NoiseArray {
        let nx = self.grid.nx();
        let mut data = vec![0.0; nx * self.grid.nt()];
        for (n, row) in data.chunks_exact_mut(nx).enumerate() {
            self.fill_row(n, row);
        }
        NoiseArray { grid: self.grid, data }
    }
}

impl NoiseSource for NoiseRealization {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn fill_row(&self, n: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.grid.nx());
        fill_standard_normal(KeyDomain::SpaceTimeNoise, self.seed, self.stream_id, n as u64, out);
        let scale = (self.grid.dt() * self.grid.dx()).sqrt();
        out.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Explicit row-major `nt x nx` array of increments.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseArray {
    grid: GridSpec,
    data: Vec<f64>,
}

impl NoiseArray {
    pub fn zeros(grid: &GridSpec) -> Self {
        NoiseArray { grid: *grid, data: vec![0.0; grid.nx() * grid.nt()] }
    }

    pub fn from_vec(grid: &GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.nx() * grid.nt() {
            return Err(Error::InvalidArgument(format!(
                "noise array has {} entries, grid needs {}",
                data.len(),
                grid.nx() * grid.nt()
            )));
        }
        Ok(NoiseArray { grid: *grid, data })
    }

    pub fn scaled(&self, c: f64) -> Self {
        NoiseArray { grid: self.grid, data: self.data.iter().map(|v| c * v).collect() }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.data[n * nx..(n + 1) * nx]
    }
}

impl NoiseSource for NoiseArray {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn fill_row(&self, n: usize, out: &mut [f64]) {
        out.copy_from_slice(self.row(n));
    }
}

/// Exact sample statistics of a noise realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSummary {
    pub mean: f64,
    pub variance: f64,
    /// Lag-1 correlation between neighbouring cells in space; `None` when the variance vanishes.
    pub lag1_space: Option<f64>,
    /// Lag-1 correlation between consecutive time steps; `None` when the variance vanishes.
    pub lag1_time: Option<f64>,
}

impl NoiseSummary {
    /// Largest absolute lag-1 correlation, if defined.
    pub fn max_abs_lag1(&self) -> Option<f64> {
        Some(self.lag1_space?.abs().max(self.lag1_time?.abs()))
    }
}

/// Mean, variance and lag-1 correlations, streamed row by row.
pub fn noise_statistics(noise: &dyn NoiseSource) -> NoiseSummary {
    let grid = *noise.grid();
    let (nx, nt) = (grid.nx(), grid.nt());
    let mut row = vec![0.0; nx];
    let mut prev = vec![0.0; nx];

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for n in 0..nt {
        noise.fill_row(n, &mut row);
        sum += row.iter().sum::<f64>();
        sum_sq += row.iter().map(|v| v * v).sum::<f64>();
    }
    let count = (nx * nt) as f64;
    let mean = sum / count;
    let variance = (sum_sq / count - mean * mean).max(0.0);

    let mut space = 0.0;
    let mut space_pairs = 0usize;
    let mut time = 0.0;
    let mut time_pairs = 0usize;
    for n in 0..nt {
        noise.fill_row(n, &mut row);
        for w in row.windows(2) {
            space += (w[0] - mean) * (w[1] - mean);
        }
        space_pairs += nx - 1;
        if n > 0 {
            time += row.iter().zip(&prev).map(|(a, b)| (a - mean) * (b - mean)).sum::<f64>();
            time_pairs += nx;
        }
        std::mem::swap(&mut row, &mut prev);
    }
    let corr = |acc: f64, pairs: usize| {
        (variance > 0.0 && pairs > 0).then(|| acc / pairs as f64 / variance)
    };
    NoiseSummary {
        mean,
        variance,
        lag1_space: corr(space, space_pairs),
        lag1_time: corr(time, time_pairs),
    }
}
