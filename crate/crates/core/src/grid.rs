//! Space-time discretization of a truncated, periodically wrapped domain.

use crate::error::{Error, Result};

/// Width-to-horizon ratio required by the boundary guard: `x_max - x_min >= 10 sqrt(t_end)`.
pub const BOUNDARY_GUARD_RATIO: f64 = 10.0;

/// Uniform grid on `[x_min, x_max) x [t_start, t_end]`.
///
/// Spatial points are `x_i = x_min + i dx` for `i in 0..nx` with `x_max`
/// identified with `x_min`. Time levels are `t_n = t_start + n dt` for
/// `n in 0..=nt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    nx: usize,
    t_start: f64,
    t_end: f64,
    nt: usize,
}

/// Builds a validated grid, enforcing the boundary guard unless `override_guard` is set.
pub fn make_grid(
    x_min: f64,
    x_max: f64,
    nx: usize,
    t_start: f64,
    t_end: f64,
    nt: usize,
    override_guard: bool,
) -> Result<GridSpec> {
    let bounds = [x_min, x_max, t_start, t_end];
    if bounds.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite bounds {bounds:?}")));
    }
    if nx == 0 || nt == 0 {
        return Err(Error::InvalidGrid(format!("zero cells (nx = {nx}, nt = {nt})")));
    }
    if x_max <= x_min {
        return Err(Error::InvalidGrid(format!("x_max = {x_max} <= x_min = {x_min}")));
    }
    if t_start < 0.0 || t_end <= t_start {
        return Err(Error::InvalidGrid(format!(
            "time interval [{t_start}, {t_end}] is empty or negative"
        )));
    }
    let grid = GridSpec { x_min, x_max, nx, t_start, t_end, nt };
    if !override_guard && !grid.satisfies_guard() {
        return Err(Error::BoundaryGuard {
            width: grid.width(),
            required: grid.required_width(),
        });
    }
    Ok(grid)
}

impl GridSpec {
    /// Guarded constructor; see [`make_grid`].
    pub fn new(x_min: f64, x_max: f64, nx: usize, t_start: f64, t_end: f64, nt: usize) -> Result<Self> {
        make_grid(x_min, x_max, nx, t_start, t_end, nt, false)
    }

    /// Symmetric grid `[-half_width, half_width)` with spacing `dx`, `nt` steps of `dt` from `t_start`.
    pub fn symmetric(half_width: f64, dx: f64, t_start: f64, dt: f64, nt: usize) -> Result<Self> {
        let nx = (2.0 * half_width / dx).round() as usize;
        make_grid(-half_width, half_width, nx, t_start, t_start + dt * nt as f64, nt, false)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn t_start(&self) -> f64 {
        self.t_start
    }
    pub fn t_end(&self) -> f64 {
        self.t_end
    }
    pub fn nt(&self) -> usize {
        self.nt
    }
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }
    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.nt as f64
    }
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }
    pub fn required_width(&self) -> f64 {
        BOUNDARY_GUARD_RATIO * self.t_end.sqrt()
    }
    pub fn satisfies_guard(&self) -> bool {
        self.width() >= self.required_width()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn t(&self, n: usize) -> f64 {
        self.t_start + n as f64 * self.dt()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    /// Index of the grid point nearest to `x`, or an error if `x` is not a grid point.
    pub fn index_of(&self, x: f64) -> Result<usize> {
        let pos = (x - self.x_min) / self.dx();
        let i = pos.round();
        if i < 0.0 || i >= self.nx as f64 || (pos - i).abs() > 1e-6 {
            return Err(Error::OutOfRange(format!("x = {x} (not a grid point)")));
        }
        Ok(i as usize)
    }

    /// Index of the spatial origin, where temporal paths are recorded.
    pub fn origin_index(&self) -> Result<usize> {
        self.index_of(0.0)
    }

    /// Time-step index of absolute time `t`; `t` must lie on the grid.
    pub fn step_of(&self, t: f64) -> Result<usize> {
        let pos = (t - self.t_start) / self.dt();
        let n = pos.round();
        if n < 0.0 || n > self.nt as f64 || (pos - n).abs() > 1e-6 {
            return Err(Error::OutOfRange(format!("t = {t} (grid covers [{}, {}])", self.t_start, self.t_end)));
        }
        Ok(n as usize)
    }
}
