//! Operator-splitting solver for the multiplicative stochastic heat equation
//! and the additive linear equation, with Cole-Hopf post-processing.
//!
//! One step from `t_n` to `t_{n+1}`:
//!
//! * multiplicative: `Z <- heat(Z, dt)`, then `Z_i *= exp(dW_{n,i}/dx - dt/(2 dx))`;
//! * additive: `V <- heat(V, dt)`, then `V_i += dW_{n,i}/dx`.
//!
//! The multiplier has conditional mean one, so `E[Z]` follows the heat flow
//! exactly, and it never depends on the field, so the scheme is linear in
//! the initial condition.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::initial::{make_initial_field, InitialDatum};
use crate::kernel::HeatPropagator;
use crate::noise::NoiseSource;
use crate::path::Path;

/// Fields larger than `e^300` are renormalized into [`FieldState::log_scale`].
const RESCALE_THRESHOLD: f64 = 1.942_426_395_241_255_8e130; // e^300

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Multiplicative,
    Additive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Multiplicative => "multiplicative",
            Mode::Additive => "additive",
        }
    }
}

/// A field on the grid at absolute time `t_abs`.
///
/// The represented field is `values * exp(log_scale)`; `log_scale` stays zero
/// unless the multiplicative solution grows past `e^300`. Spectral round-off
/// may leave entries of order `1e-16 * max` with either sign where the true
/// field underflows.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t_abs: f64,
    pub values: Vec<f64>,
    pub mode: Mode,
    pub log_scale: f64,
}

impl FieldState {
    pub fn new(t_abs: f64, values: Vec<f64>, mode: Mode) -> Self {
        FieldState { t_abs, values, mode, log_scale: 0.0 }
    }

    /// Field values in absolute units.
    pub fn actual(&self) -> Vec<f64> {
        let s = self.log_scale.exp();
        self.values.iter().map(|v| v * s).collect()
    }

    /// Exact heat propagation by `dt` on the grid's periodic domain.
    pub fn heat_step(&self, grid: &GridSpec, dt: f64) -> Result<FieldState> {
        Ok(FieldState {
            t_abs: self.t_abs + dt,
            values: crate::kernel::heat_step(&self.values, grid.dx(), dt)?,
            mode: self.mode,
            log_scale: self.log_scale,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveOptions {
    /// Absolute times at which to keep full field snapshots (must be grid times).
    pub snapshot_times: Vec<f64>,
    /// Record the origin value every `origin_stride` steps (0 is treated as 1).
    pub origin_stride: usize,
}

impl SolveOptions {
    pub fn with_snapshots(times: &[f64]) -> Self {
        SolveOptions { snapshot_times: times.to_vec(), origin_stride: 1 }
    }
}

/// Solution record: the temporal process at `x = 0` and optional snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: GridSpec,
    pub ic: InitialDatum,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub stream_id: Option<u64>,
    /// Origin values (in units of `exp(origin_log_scale[i])` when that is non-empty).
    pub origin: Vec<f64>,
    pub origin_log_scale: Vec<f64>,
    pub origin_t0: f64,
    pub origin_dt: f64,
    pub snapshots: Vec<FieldState>,
}

impl Trajectory {
    fn log_scale_at(&self, i: usize) -> f64 {
        self.origin_log_scale.get(i).copied().unwrap_or(0.0)
    }

    /// `Z_t` (or `V_t`) at `x = 0`.
    pub fn origin_path(&self) -> Result<Path> {
        let values = self.origin.iter().enumerate().map(|(i, v)| v * self.log_scale_at(i).exp()).collect();
        Path::new(self.origin_t0, self.origin_dt, values)
    }

    /// `H_t = log Z_t` at `x = 0`, computed without leaving log space.
    pub fn height_path(&self) -> Result<Path> {
        if self.mode != Mode::Multiplicative {
            return Err(Error::Incompatible("height path needs a multiplicative trajectory".into()));
        }
        let mut values = Vec::with_capacity(self.origin.len());
        for (i, v) in self.origin.iter().enumerate() {
            if !(*v > 0.0) {
                return Err(Error::NonPositive { index: i, value: *v });
            }
            values.push(v.ln() + self.log_scale_at(i));
        }
        Path::new(self.origin_t0, self.origin_dt, values)
    }

    pub fn snapshot_at(&self, t: f64) -> Result<&FieldState> {
        let tol = 1e-9 * self.grid.dt();
        self.snapshots
            .iter()
            .find(|s| (s.t_abs - t).abs() <= tol)
            .ok_or_else(|| Error::OutOfRange(format!("no snapshot stored at t = {t}")))
    }
}

/// Time-steps `ic` through `noise` on `grid`.
///
/// Additive mode requires the zero initial field, expressed as the function
/// datum `-inf` (zero mass) or `0`-valued table; any other datum is rejected.
pub fn solve(
    grid: &GridSpec,
    ic: &InitialDatum,
    noise: &dyn NoiseSource,
    mode: Mode,
    options: &SolveOptions,
) -> Result<Trajectory> {
    if noise.grid() != grid {
        return Err(Error::Incompatible("noise realization lives on a different grid".into()));
    }
    let initial = match mode {
        Mode::Multiplicative => make_initial_field(grid, ic)?,
        Mode::Additive => {
            let field = make_initial_field(grid, ic)?;
            if field.values.iter().any(|v| *v != 0.0) {
                return Err(Error::Incompatible(
                    "additive mode starts from V_0 = 0; use the zero-mass datum f = -inf".into(),
                ));
            }
            FieldState::new(grid.t_start(), vec![0.0; grid.nx()], Mode::Additive)
        }
    };
    solve_from(grid, ic.clone(), initial, noise, options)
}

/// Same as [`solve`] but from an explicit initial field.
pub fn solve_from(
    grid: &GridSpec,
    ic: InitialDatum,
    initial: FieldState,
    noise: &dyn NoiseSource,
    options: &SolveOptions,
) -> Result<Trajectory> {
    let (nx, nt) = (grid.nx(), grid.nt());
    if initial.values.len() != nx {
        return Err(Error::InvalidArgument("initial field length differs from grid".into()));
    }
    let mode = initial.mode;
    let origin_index = grid.origin_index()?;
    let stride = options.origin_stride.max(1);
    let mut snapshot_steps = options
        .snapshot_times
        .iter()
        .map(|t| grid.step_of(*t))
        .collect::<Result<Vec<_>>>()?;
    snapshot_steps.sort_unstable();
    snapshot_steps.dedup();

    let dx = grid.dx();
    let dt = grid.dt();
    let inv_dx = 1.0 / dx;
    let ito_drift = -dt / (2.0 * dx);
    let mut heat = HeatPropagator::new(nx, dx, dt)?;

    let mut values = initial.values;
    let mut log_scale = initial.log_scale;
    let mut rescaled = log_scale != 0.0;
    let mut row = vec![0.0; nx];

    let mut origin = Vec::with_capacity(nt / stride + 1);
    let mut origin_log_scale = Vec::new();
    let mut snapshots = Vec::with_capacity(snapshot_steps.len());
    let mut next_snapshot = 0;

    let mut record = |n: usize, values: &[f64], log_scale: f64, rescaled: bool, origin_log_scale: &mut Vec<f64>| {
        if n % stride == 0 {
            origin.push(values[origin_index]);
            if rescaled {
                origin_log_scale.resize(origin.len() - 1, 0.0);
                origin_log_scale.push(log_scale);
            }
        }
        if next_snapshot < snapshot_steps.len() && snapshot_steps[next_snapshot] == n {
            snapshots.push(FieldState { t_abs: grid.t(n), values: values.to_vec(), mode, log_scale });
            next_snapshot += 1;
        }
    };
    record(0, &values, log_scale, rescaled, &mut origin_log_scale);

    for n in 0..nt {
        heat.apply(&mut values);
        noise.fill_row(n, &mut row);
        match mode {
            Mode::Multiplicative => {
                for (v, w) in values.iter_mut().zip(&row) {
                    *v *= (w * inv_dx + ito_drift).exp();
                }
            }
            Mode::Additive => {
                for (v, w) in values.iter_mut().zip(&row) {
                    *v += w * inv_dx;
                }
            }
        }
        let mut peak = 0.0f64;
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { step: n + 1, index: i });
            }
            peak = peak.max(v.abs());
        }
        if mode == Mode::Multiplicative && peak > RESCALE_THRESHOLD {
            let inv = 1.0 / peak;
            values.iter_mut().for_each(|v| *v *= inv);
            log_scale += peak.ln();
            rescaled = true;
        }
        record(n + 1, &values, log_scale, rescaled, &mut origin_log_scale);
    }
    if rescaled {
        origin_log_scale.resize(origin.len(), log_scale);
    }

    Ok(Trajectory {
        grid: *grid,
        ic,
        mode,
        seed: None,
        stream_id: None,
        origin,
        origin_log_scale,
        origin_t0: grid.t_start(),
        origin_dt: dt * stride as f64,
        snapshots,
    })
}

/// Pointwise natural logarithm of a positive path.
pub fn cole_hopf(path: &Path) -> Result<Path> {
    if let Some((i, v)) = path.values().iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonPositive { index: i, value: *v });
    }
    path.map(f64::ln)
}

/// `h_t(alpha, 0) = [log Z_{alpha t}(0) + alpha t / 24] / t^{1/3}` from a path of `Z` values.
pub fn scaled_height_from_path(z: &Path, t: f64, alpha: f64) -> Result<f64> {
    if !(t > 0.0) || !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("scaled height needs t, alpha > 0 (got {t}, {alpha})")));
    }
    let zt = z.value_at(alpha * t)?;
    if !(zt > 0.0) {
        return Err(Error::NonPositive { index: z.index_of(alpha * t)?, value: zt });
    }
    Ok((zt.ln() + alpha * t / 24.0) / t.cbrt())
}

/// 1:2:3 scaled height at `x = 0` for a narrow-wedge trajectory.
pub fn scaled_height(traj: &Trajectory, t: f64, alpha: f64) -> Result<f64> {
    if !matches!(traj.ic, InitialDatum::NarrowWedge { .. }) || traj.mode != Mode::Multiplicative {
        return Err(Error::Incompatible("scaled height is defined for narrow-wedge trajectories".into()));
    }
    let h = traj.height_path()?;
    if !(t > 0.0) || !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("scaled height needs t, alpha > 0 (got {t}, {alpha})")));
    }
    let log_z = h.value_at(alpha * t)?;
    Ok((log_z + alpha * t / 24.0) / t.cbrt())
}

/// 1:2:3 scaled height at general `x`, read from the snapshot at time `alpha t`
/// at the grid point nearest `t^{2/3} x`.
pub fn scaled_height_at(traj: &Trajectory, t: f64, alpha: f64, x: f64) -> Result<f64> {
    if !matches!(traj.ic, InitialDatum::NarrowWedge { .. }) || traj.mode != Mode::Multiplicative {
        return Err(Error::Incompatible("scaled height is defined for narrow-wedge trajectories".into()));
    }
    let snap = traj.snapshot_at(alpha * t)?;
    let g = &traj.grid;
    let pos = ((t.powf(2.0 / 3.0) * x - g.x_min()) / g.dx()).round();
    if pos < 0.0 || pos >= g.nx() as f64 {
        return Err(Error::OutOfRange(format!("x = {x} maps outside the grid")));
    }
    let z = snap.values[pos as usize];
    if !(z > 0.0) {
        return Err(Error::NonPositive { index: pos as usize, value: z });
    }
    Ok((z.ln() + snap.log_scale + alpha * t / 24.0) / t.cbrt())
}

/// `y -> Z(s, y) exp(y^2 / 2s)` for a narrow-wedge field at absolute time `s`.
pub fn stationarity_transform(field: &FieldState, grid: &GridSpec) -> Result<Vec<f64>> {
    let s = field.t_abs;
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("transform needs s > 0, got {s}")));
    }
    if field.mode != Mode::Multiplicative {
        return Err(Error::Incompatible("transform applies to multiplicative fields".into()));
    }
    let scale = field.log_scale.exp();
    Ok(field
        .values
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let y = grid.x(i);
            z * scale * (y * y / (2.0 * s)).exp()
        })
        .collect())
}
