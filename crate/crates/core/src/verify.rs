//! Oracle-backed checks tying simulated paths to their limiting second moments and laws.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::initial::{make_initial_field, FunctionDescriptor, InitialDatum};
use crate::kernel::linear_increment_variance;
use crate::noise::NoiseSource;
use crate::path::Path;
use crate::solver::{solve_from, FieldState, Mode, SolveOptions};
use crate::stats::{increments_at, ks_normality, mean_and_se, standardized_increments, variance_and_se, KsResult};

/// Minimum ensemble size for variance-ratio checks.
pub const MIN_RATIO_PATHS: usize = 200;
/// Minimum ensemble size for the joint Gaussian-limit check.
pub const MIN_GAUSSIAN_PATHS: usize = 500;

/// How a check's tolerance is declared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    /// Fraction of `|target|`.
    Relative(f64),
    /// Multiple of the reported standard error.
    StandardErrors(f64),
}

impl Tolerance {
    fn absolute(self, target: f64, se: f64) -> f64 {
        match self {
            Tolerance::Absolute(a) => a,
            Tolerance::Relative(r) => r * target.abs(),
            Tolerance::StandardErrors(k) => k * se,
        }
    }
}

/// One verified quantity. `pass` holds exactly when `|measured - target| <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub target: f64,
    pub measured: f64,
    /// Standard error of `measured`; NaN for deterministic checks.
    pub se: f64,
    /// Absolute tolerance actually applied.
    pub tolerance: f64,
    pub declared: Tolerance,
    pub pass: bool,
    pub replicas: usize,
    pub runtime: Duration,
}

impl CheckReport {
    pub fn new(name: &str, target: f64, measured: f64, se: f64, declared: Tolerance, replicas: usize, runtime: Duration) -> Self {
        let tolerance = declared.absolute(target, se);
        let pass = (measured - target).abs() <= tolerance;
        CheckReport { name: name.to_string(), target, measured, se, tolerance, declared, pass, replicas, runtime }
    }

    /// Report for a boolean property: target 1, measured 1 or 0.
    pub fn property(name: &str, holds: bool, replicas: usize, runtime: Duration) -> Self {
        CheckReport::new(name, 1.0, if holds { 1.0 } else { 0.0 }, f64::NAN, Tolerance::Absolute(0.0), replicas, runtime)
    }

    /// Same check with a stricter verdict (e.g. an extra side condition).
    pub fn and(mut self, holds: bool) -> Self {
        self.pass &= holds;
        self
    }
}

/// Denominator used by [`increment_variance_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalizer {
    /// Exact variance of the additive-noise solution started from zero.
    LinearOracle,
    /// `(2/pi)^{1/2} sqrt(eps)` times the sample mean of `Z_t^2`, for paths of `Z`.
    AsymptoticZ,
    /// `(2/pi)^{1/2} sqrt(eps)`, for height paths or rescaled fBm.
    AsymptoticH,
}

fn check_family(paths: &[Path], min: usize) -> Result<()> {
    if paths.len() < min {
        return Err(Error::Insufficient(format!("{} paths supplied, at least {min} required", paths.len())));
    }
    let (t0, dt) = (paths[0].t0(), paths[0].dt());
    if paths.iter().any(|p| p.t0() != t0 || p.dt() != dt) {
        return Err(Error::Incompatible("paths live on different time grids".into()));
    }
    Ok(())
}

/// Sample variance of `X_{t+eps} - X_t` across paths divided by the chosen normalizer.
///
/// For [`Normalizer::AsymptoticZ`] the ratio of two sample means is reported with its
/// delta-method standard error; otherwise the error comes from the fourth sample moment.
pub fn increment_variance_ratio(
    paths: &[Path],
    t: f64,
    epsilon: f64,
    normalizer: Normalizer,
    tolerance: Tolerance,
) -> Result<CheckReport> {
    let start = Instant::now();
    check_family(paths, MIN_RATIO_PATHS)?;
    let inc = increments_at(paths, t, epsilon)?;
    let asymptotic = (2.0 / PI).sqrt() * epsilon.sqrt();
    let (name, measured, se) = match normalizer {
        Normalizer::LinearOracle => {
            let (v, se) = variance_and_se(&inc);
            let oracle = linear_increment_variance(t, epsilon)?;
            ("increment variance / linear oracle", v / oracle, se / oracle)
        }
        Normalizer::AsymptoticH => {
            let (v, se) = variance_and_se(&inc);
            ("increment variance / (2/pi)^1/2 eps^1/2", v / asymptotic, se / asymptotic)
        }
        Normalizer::AsymptoticZ => {
            let n = inc.len() as f64;
            let (m, _) = mean_and_se(&inc);
            let num: Vec<f64> = inc.iter().map(|d| (d - m).powi(2) * n / (n - 1.0)).collect();
            let den = paths
                .iter()
                .map(|p| Ok(asymptotic * p.value_at(t)?.powi(2)))
                .collect::<Result<Vec<f64>>>()?;
            let (a, _) = mean_and_se(&num);
            let (b, _) = mean_and_se(&den);
            let r = a / b;
            let resid: Vec<f64> = num.iter().zip(&den).map(|(x, y)| x - r * y).collect();
            let (_, se_resid) = mean_and_se(&resid);
            ("increment variance / (2/pi)^1/2 eps^1/2 E[Z^2]", r, se_resid / b)
        }
    };
    Ok(CheckReport::new(name, 1.0, measured, se, tolerance, paths.len(), start.elapsed()))
}

/// Superposition check under one shared noise realization.
///
/// Solves from `e^{f1}`, `e^{f2}` and `e^{f1} + e^{f2}` and reports the largest
/// `|Z^{1+2} - Z^1 - Z^2| / max(|Z^1| + |Z^2|)` over all stored time levels.
pub fn linearity_check(
    grid: &GridSpec,
    noise: &dyn NoiseSource,
    ic1: &FunctionDescriptor,
    ic2: &FunctionDescriptor,
    mode: Mode,
) -> Result<CheckReport> {
    if mode != Mode::Multiplicative {
        return Err(Error::Incompatible("superposition is checked on the multiplicative equation".into()));
    }
    let start = Instant::now();
    let d1 = InitialDatum::Function(ic1.clone());
    let d2 = InitialDatum::Function(ic2.clone());
    let f1 = make_initial_field(grid, &d1)?;
    let f2 = make_initial_field(grid, &d2)?;
    let sum: Vec<f64> = f1.values.iter().zip(&f2.values).map(|(a, b)| a + b).collect();
    let f12 = FieldState::new(grid.t_start(), sum, Mode::Multiplicative);
    let times: Vec<f64> = (0..=grid.nt()).map(|n| grid.t(n)).collect();
    let opts = SolveOptions::with_snapshots(&times);
    let t1 = solve_from(grid, d1.clone(), f1, noise, &opts)?;
    let t2 = solve_from(grid, d2, f2, noise, &opts)?;
    let t12 = solve_from(grid, d1, f12, noise, &opts)?;
    let mut worst = 0.0f64;
    for ((a, b), c) in t1.snapshots.iter().zip(&t2.snapshots).zip(&t12.snapshots) {
        let (a, b, c) = (a.actual(), b.actual(), c.actual());
        let scale = a.iter().zip(&b).map(|(x, y)| x.abs() + y.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            continue;
        }
        for i in 0..a.len() {
            worst = worst.max((c[i] - a[i] - b[i]).abs() / scale);
        }
    }
    Ok(CheckReport::new("superposition deviation", 0.0, worst, f64::NAN, Tolerance::Absolute(1e-10), 1, start.elapsed()))
}

/// Decorrelation and marginal normality of standardized increments at several times.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLimitReport {
    /// `(i, j, r)` for each pair of columns.
    pub correlations: Vec<(usize, usize, f64)>,
    /// Standard error of a correlation under independence, `1/sqrt(n)`.
    pub correlation_se: f64,
    pub marginals: Vec<KsResult>,
    /// Largest `|r|` against the declared tolerance, failing also if any marginal fails KS.
    pub report: CheckReport,
}

/// Joint check on the standardized increments `(pi/2)^{1/4} eps^{-1/4} (X_{t_i+eps} - X_{t_i})`.
pub fn gaussian_limit_check(paths: &[Path], times: &[f64], epsilon: f64, tolerance: Tolerance) -> Result<GaussianLimitReport> {
    check_family(paths, MIN_GAUSSIAN_PATHS)?;
    if times.len() < 2 {
        return Err(Error::InvalidArgument("need at least two times".into()));
    }
    for w in times.windows(2) {
        if w[0] + epsilon > w[1] + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "increments at {} and {} overlap for eps = {epsilon}; times must increase by at least eps",
                w[0], w[1]
            )));
        }
    }
    let columns = times
        .iter()
        .map(|t| standardized_increments(paths, *t, epsilon))
        .collect::<Result<Vec<_>>>()?;
    gaussian_limit_from_columns(&columns, tolerance)
}

/// [`gaussian_limit_check`] on precomputed standardized increment columns.
pub fn gaussian_limit_from_columns(columns: &[Vec<f64>], tolerance: Tolerance) -> Result<GaussianLimitReport> {
    let start = Instant::now();
    let n = columns.first().map_or(0, |c| c.len());
    if columns.len() < 2 || columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidArgument("need at least two columns of equal length".into()));
    }
    let marginals = columns.iter().map(|c| ks_normality(c)).collect::<Result<Vec<_>>>()?;
    let mut correlations = Vec::new();
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            correlations.push((i, j, correlation(&columns[i], &columns[j])));
        }
    }
    let worst = correlations.iter().map(|c| c.2.abs()).fold(0.0, f64::max);
    let se = 1.0 / (n as f64).sqrt();
    let report = CheckReport::new("max |increment correlation|", 0.0, worst, se, tolerance, n, start.elapsed())
        .and(marginals.iter().all(|k| k.passes()));
    Ok(GaussianLimitReport { correlations, correlation_se: se, marginals, report })
}

/// Pearson sample correlation.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}
