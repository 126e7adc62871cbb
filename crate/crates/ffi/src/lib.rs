//! C ABI over `kpzlab`.
//!
//! Every fallible call returns a [`KpzStatus`]; on failure the message is available from
//! [`kpz_last_error`] on the same thread. Objects are opaque handles released with the
//! matching `*_free` function. Null handles passed to `*_free` are ignored.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kpzlab::fbm::{sample_fbm_circulant, sample_fbm_cholesky, FbmMethod, FbmSpec, KPZ_FBM_SCALE};
use kpzlab::kernel::{heat_kernel, linear_increment_variance};
use kpzlab::stats::{alpha_variation, lil_profile, moc_profile};
use kpzlab::{make_grid, sample_noise, solve, Error, GridSpec, InitialDatum, Mode, Path, SolveOptions, Trajectory};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KpzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGrid = 3,
    BoundaryGuard = 4,
    NotGridMultiple = 5,
    OutOfRange = 6,
    NonFinite = 7,
    NonPositive = 8,
    Incompatible = 9,
    Overflow = 10,
    Expression = 11,
    NotPositiveDefinite = 12,
    NegativeEigenvalue = 13,
    Insufficient = 14,
    Config = 15,
    Io = 16,
    Format = 17,
    BufferTooSmall = 18,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KpzMode {
    Multiplicative = 0,
    Additive = 1,
}

/// Space-time grid.
pub struct KpzGrid(GridSpec);
/// Initial datum.
pub struct KpzInitial(InitialDatum);
/// Uniformly sampled real path.
pub struct KpzPath(Path);
/// Solver output.
pub struct KpzTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> KpzStatus {
    match e {
        Error::InvalidGrid(_) => KpzStatus::InvalidGrid,
        Error::BoundaryGuard { .. } => KpzStatus::BoundaryGuard,
        Error::InvalidArgument(_) => KpzStatus::InvalidArgument,
        Error::NotGridMultiple { .. } => KpzStatus::NotGridMultiple,
        Error::OutOfRange(_) => KpzStatus::OutOfRange,
        Error::NonFinite { .. } => KpzStatus::NonFinite,
        Error::NonPositive { .. } => KpzStatus::NonPositive,
        Error::Incompatible(_) => KpzStatus::Incompatible,
        Error::Overflow { .. } => KpzStatus::Overflow,
        Error::Expr(_) => KpzStatus::Expression,
        Error::NotPositiveDefinite => KpzStatus::NotPositiveDefinite,
        Error::NegativeEigenvalue(_) => KpzStatus::NegativeEigenvalue,
        Error::Insufficient(_) => KpzStatus::Insufficient,
        Error::Config(_) => KpzStatus::Config,
        Error::Io(_) => KpzStatus::Io,
        Error::Format(_) => KpzStatus::Format,
    }
}

struct Fail(KpzStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(KpzStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KpzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            KpzStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            KpzStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn kpz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kpz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Heat kernel `p_t(x)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_heat_kernel(t: f64, x: f64, out: *mut f64) -> KpzStatus {
    guard(|| write(out, heat_kernel(t, x)?))
}

/// Closed-form `Var(V_{t+eps} - V_t)` for the additive equation.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_linear_increment_variance(t: f64, eps: f64, out: *mut f64) -> KpzStatus {
    guard(|| write(out, linear_increment_variance(t, eps)?))
}

/// Builds a grid; `override_guard` disables the `10 sqrt(t_end)` width check.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_grid_new(
    x_min: f64,
    x_max: f64,
    nx: usize,
    t_start: f64,
    t_end: f64,
    nt: usize,
    override_guard: bool,
    out: *mut *mut KpzGrid,
) -> KpzStatus {
    guard(|| store(out, KpzGrid(make_grid(x_min, x_max, nx, t_start, t_end, nt, override_guard)?)))
}

/// # Safety
/// `grid` must be null or a handle from [`kpz_grid_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kpz_grid_free(grid: *mut KpzGrid) {
    free(grid)
}

/// Narrow-wedge datum started at `t0 > 0`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_initial_narrow_wedge(t0: f64, out: *mut *mut KpzInitial) -> KpzStatus {
    guard(|| store(out, KpzInitial(InitialDatum::narrow_wedge(t0)?)))
}

/// Two-sided Brownian datum drawn from `seed`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_initial_brownian(seed: u64, out: *mut *mut KpzInitial) -> KpzStatus {
    guard(|| store(out, KpzInitial(InitialDatum::Brownian { seed })))
}

/// `Z_0 = exp(f)` with `f` given as an expression such as `"-x^2"` or `"-inf"`.
///
/// # Safety
/// `expr` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_initial_expr(expr: *const c_char, out: *mut *mut KpzInitial) -> KpzStatus {
    guard(|| {
        if expr.is_null() {
            return Err(null("expr"));
        }
        let text = CStr::from_ptr(expr)
            .to_str()
            .map_err(|_| Fail(KpzStatus::InvalidArgument, "expr is not UTF-8".into()))?;
        store(out, KpzInitial(InitialDatum::expr(text)?))
    })
}

/// # Safety
/// `ic` must be null or a live initial-datum handle.
#[no_mangle]
pub unsafe extern "C" fn kpz_initial_free(ic: *mut KpzInitial) {
    free(ic)
}

/// Solves one replica driven by the noise stream `(seed, stream)`, recording the origin
/// every `origin_stride` steps.
///
/// # Safety
/// `grid` and `ic` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_solve(
    grid: *const KpzGrid,
    ic: *const KpzInitial,
    mode: KpzMode,
    seed: u64,
    stream: u64,
    origin_stride: usize,
    out: *mut *mut KpzTrajectory,
) -> KpzStatus {
    guard(|| {
        let grid = &deref(grid, "grid")?.0;
        let ic = &deref(ic, "initial datum")?.0;
        let mode = match mode {
            KpzMode::Multiplicative => Mode::Multiplicative,
            KpzMode::Additive => Mode::Additive,
        };
        let noise = sample_noise(grid, seed, stream);
        let opts = SolveOptions { snapshot_times: vec![], origin_stride };
        let mut traj = solve(grid, ic, &noise, mode, &opts)?;
        traj.seed = Some(seed);
        traj.stream_id = Some(stream);
        store(out, KpzTrajectory(traj))
    })
}

/// `Z_t(0)` (or `V_t(0)` in additive mode) as a path.
///
/// # Safety
/// `traj` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_trajectory_origin_path(traj: *const KpzTrajectory, out: *mut *mut KpzPath) -> KpzStatus {
    guard(|| store(out, KpzPath(deref(traj, "trajectory")?.0.origin_path()?)))
}

/// `H_t = log Z_t(0)` (multiplicative runs only).
///
/// # Safety
/// `traj` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_trajectory_height_path(traj: *const KpzTrajectory, out: *mut *mut KpzPath) -> KpzStatus {
    guard(|| store(out, KpzPath(deref(traj, "trajectory")?.0.height_path()?)))
}

/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpz_trajectory_free(traj: *mut KpzTrajectory) {
    free(traj)
}

/// Copies `len` values sampled at `t0 + i dt` into a new path.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_path_new(t0: f64, dt: f64, values: *const f64, len: usize, out: *mut *mut KpzPath) -> KpzStatus {
    guard(|| store(out, KpzPath(Path::new(t0, dt, slice(values, len, "values")?.to_vec())?)))
}

/// # Safety
/// `path` must be a live handle or null (then 0 is returned).
#[no_mangle]
pub unsafe extern "C" fn kpz_path_len(path: *const KpzPath) -> usize {
    path.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `path` must be a live handle or null (then NaN is returned).
#[no_mangle]
pub unsafe extern "C" fn kpz_path_t0(path: *const KpzPath) -> f64 {
    path.as_ref().map_or(f64::NAN, |p| p.0.t0())
}

/// # Safety
/// `path` must be a live handle or null (then NaN is returned).
#[no_mangle]
pub unsafe extern "C" fn kpz_path_dt(path: *const KpzPath) -> f64 {
    path.as_ref().map_or(f64::NAN, |p| p.0.dt())
}

/// Copies the path values into `buf`; fails with `BufferTooSmall` if `cap < len`.
///
/// # Safety
/// `path` must be a live handle; `buf` must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_path_values(path: *const KpzPath, buf: *mut f64, cap: usize) -> KpzStatus {
    guard(|| {
        let v = deref(path, "path")?.0.values();
        if cap < v.len() {
            return Err(Fail(KpzStatus::BufferTooSmall, format!("need {} values, buffer holds {cap}", v.len())));
        }
        if buf.is_null() && !v.is_empty() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// # Safety
/// `path` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpz_path_free(path: *mut KpzPath) {
    free(path)
}

/// Exact fBm on `[0, n dt]` by circulant embedding (`n` a power of two), optionally
/// multiplied by `(2/pi)^{1/4}`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_fbm_circulant(
    hurst: f64,
    n: usize,
    dt: f64,
    seed: u64,
    stream: u64,
    rescale: bool,
    out: *mut *mut KpzPath,
) -> KpzStatus {
    guard(|| {
        let p = sample_fbm_circulant(hurst, n, dt, seed, stream)?;
        store(out, KpzPath(if rescale { p.scaled(KPZ_FBM_SCALE) } else { p }))
    })
}

/// Exact fBm at arbitrary distinct positive times by Cholesky factorization; writes
/// `len` values into `values_out`.
///
/// # Safety
/// `times` must hold `len` doubles and `values_out` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_fbm_cholesky(
    hurst: f64,
    times: *const f64,
    len: usize,
    seed: u64,
    stream: u64,
    values_out: *mut f64,
) -> KpzStatus {
    guard(|| {
        let times = slice(times, len, "times")?.to_vec();
        let spec = FbmSpec { hurst, times, method: FbmMethod::Cholesky, seed, stream };
        let v = sample_fbm_cholesky(&spec)?;
        if values_out.is_null() && !v.is_empty() {
            return Err(null("values_out"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), values_out, v.len());
        Ok(())
    })
}

/// `sum |X_{s+eps} - X_s|^alpha eps` over grid times `s` in `[a, b - eps]`.
///
/// # Safety
/// `path` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_alpha_variation(path: *const KpzPath, alpha: f64, eps: f64, a: f64, b: f64, out: *mut f64) -> KpzStatus {
    guard(|| write(out, alpha_variation(&deref(path, "path")?.0, alpha, eps, (a, b))?.value))
}

/// LIL statistic at depths `1..=max_depth` around `t`; writes `max_depth` values
/// (NaN where a depth is unavailable).
///
/// # Safety
/// `path` must be a live handle; `out` must be valid for `max_depth` writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_lil_profile(path: *const KpzPath, t: f64, max_depth: u32, min_steps: usize, out: *mut f64) -> KpzStatus {
    guard(|| {
        let prof = lil_profile(&deref(path, "path")?.0, t, max_depth, min_steps)?;
        fill_levels(&prof.levels, &prof.statistics, 1, max_depth, out)
    })
}

/// Modulus-of-continuity statistic at the given levels over `[a, b]`; writes one value per level.
///
/// # Safety
/// `path` must be a live handle; `levels` must hold `len` entries and `out` be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn kpz_moc_profile(
    path: *const KpzPath,
    a: f64,
    b: f64,
    levels: *const u32,
    len: usize,
    min_steps: usize,
    out: *mut f64,
) -> KpzStatus {
    guard(|| {
        let levels = slice(levels, len, "levels")?;
        let prof = moc_profile(&deref(path, "path")?.0, (a, b), levels, min_steps)?;
        if out.is_null() && len > 0 {
            return Err(null("out"));
        }
        for (i, level) in levels.iter().enumerate() {
            let v = prof.levels.iter().position(|l| l == level).map_or(f64::NAN, |j| prof.statistics[j]);
            *out.add(i) = v;
        }
        Ok(())
    })
}

unsafe fn fill_levels(levels: &[u32], stats: &[f64], first: u32, last: u32, out: *mut f64) -> Result<(), Fail> {
    if out.is_null() && last >= first {
        return Err(null("out"));
    }
    for (i, level) in (first..=last).enumerate() {
        *out.add(i) = levels.iter().position(|l| *l == level).map_or(f64::NAN, |j| stats[j]);
    }
    Ok(())
}
