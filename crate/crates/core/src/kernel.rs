//! Heat kernel, exact periodic heat propagation and the linear-equation
//! increment-variance oracle.

use std::f64::consts::PI;
use std::sync::Arc;

use realfft::num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};

/// `p_t(x) = (2 pi t)^{-1/2} exp(-x^2 / 2t)`.
pub fn heat_kernel(t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("heat kernel needs t > 0, got {t}")));
    }
    Ok(kernel_unchecked(t, x))
}

#[inline]
pub(crate) fn kernel_unchecked(t: f64, x: f64) -> f64 {
    (-x * x / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

/// `E[(V_{t+eps}(0) - V_t(0))^2]` for the additive-noise heat equation started from zero.
///
/// Closed form `[sqrt(2t+2eps) + sqrt(2t) - 2 sqrt(2t+eps) + 2 sqrt(eps)] / sqrt(2 pi)`.
pub fn linear_increment_variance(t: f64, eps: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be nonnegative, got {eps}")));
    }
    // The first three terms cancel to O(eps^2); group them to keep precision.
    let a = (2.0 * t + 2.0 * eps).sqrt() - (2.0 * t + eps).sqrt();
    let b = (2.0 * t).sqrt() - (2.0 * t + eps).sqrt();
    Ok((a + b + 2.0 * eps.sqrt()) / (2.0 * PI).sqrt())
}

/// Variance of `V_t(0)` itself: `int_0^t (4 pi r)^{-1/2} dr = sqrt(t / pi)`.
pub fn linear_variance(t: f64) -> f64 {
    (t / PI).sqrt()
}

/// Spectral heat propagator for a fixed periodic grid and step.
///
/// Multiplies the discrete spectrum by `exp(-k^2 dt / 2)`, which is the exact
/// heat semigroup restricted to the grid's trigonometric polynomials.
pub struct HeatPropagator {
    nx: usize,
    dt: f64,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
    factors: Vec<f64>,
    spectrum: Vec<Complex64>,
    scratch_fwd: Vec<Complex64>,
    scratch_inv: Vec<Complex64>,
}

impl std::fmt::Debug for HeatPropagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeatPropagator").field("nx", &self.nx).field("dt", &self.dt).finish()
    }
}

impl HeatPropagator {
    pub fn new(nx: usize, dx: f64, dt: f64) -> Result<Self> {
        if nx == 0 || !(dx > 0.0) || !(dt >= 0.0) {
            return Err(Error::InvalidArgument(format!("propagator needs nx > 0, dx > 0, dt >= 0 (got {nx}, {dx}, {dt})")));
        }
        let mut planner = RealFftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(nx);
        let inverse = planner.plan_fft_inverse(nx);
        let length = nx as f64 * dx;
        let factors = (0..nx / 2 + 1)
            .map(|j| {
                let k = 2.0 * PI * j as f64 / length;
                (-0.5 * k * k * dt).exp() / nx as f64
            })
            .collect();
        Ok(HeatPropagator {
            nx,
            dt,
            spectrum: forward.make_output_vec(),
            scratch_fwd: forward.make_scratch_vec(),
            scratch_inv: inverse.make_scratch_vec(),
            forward,
            inverse,
            factors,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Propagates `values` in place by one step.
    pub fn apply(&mut self, values: &mut [f64]) {
        assert_eq!(values.len(), self.nx, "field length does not match propagator");
        if self.nx == 1 {
            return;
        }
        self.forward
            .process_with_scratch(values, &mut self.spectrum, &mut self.scratch_fwd)
            .expect("buffer sizes fixed at construction");
        for (c, f) in self.spectrum.iter_mut().zip(&self.factors) {
            *c *= *f;
        }
        self.spectrum[0].im = 0.0;
        if self.nx % 2 == 0 {
            self.spectrum[self.nx / 2].im = 0.0;
        }
        self.inverse
            .process_with_scratch(&mut self.spectrum, values, &mut self.scratch_inv)
            .expect("buffer sizes fixed at construction");
    }
}

/// Exact periodic heat propagation of `values` (spacing `dx`) by time `dt`.
pub fn heat_step(values: &[f64], dx: f64, dt: f64) -> Result<Vec<f64>> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: 0, index: i });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("heat step needs dt > 0, got {dt}")));
    }
    let mut out = values.to_vec();
    HeatPropagator::new(values.len(), dx, dt)?.apply(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sampled(t: f64, dx: f64, half: f64) -> Vec<f64> {
        let nx = (2.0 * half / dx).round() as usize;
        (0..nx).map(|i| kernel_unchecked(t, -half + i as f64 * dx)).collect()
    }

    #[test]
    fn kernel_at_origin() {
        assert!((heat_kernel(1.0, 0.0).unwrap() - 0.398_942_3).abs() < 1e-7);
        assert!(heat_kernel(0.0, 1.0).is_err());
        assert!(heat_kernel(-1.0, 1.0).is_err());
    }

    #[test]
    fn kernel_integrates_to_one() {
        let dx = 1.0 / 64.0;
        let mass: f64 = sampled(1.0, dx, 8.0).iter().sum::<f64>() * dx;
        assert!((mass - 1.0).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn kernel_is_even(t in 1e-3f64..10.0, x in -20.0f64..20.0) {
            prop_assert_eq!(heat_kernel(t, x).unwrap(), heat_kernel(t, -x).unwrap());
        }

        #[test]
        fn oracle_monotone_in_eps(t in 0.1f64..5.0, e1 in 0.0f64..1.0, de in 1e-6f64..1.0) {
            let a = linear_increment_variance(t, e1).unwrap();
            let b = linear_increment_variance(t, e1 + de).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!(b > a);
        }
    }

    #[test]
    fn constants_are_fixed_points() {
        let out = heat_step(&vec![2.5; 256], 1.0 / 32.0, 0.3).unwrap();
        assert!(out.iter().all(|v| (v - 2.5).abs() < 1e-13));
    }

    #[test]
    fn mass_is_conserved() {
        let dx = 1.0 / 32.0;
        let field: Vec<f64> = (0..512).map(|i| 1.0 + (i as f64 * 0.37).sin().powi(2) * 3.0).collect();
        let before: f64 = field.iter().sum::<f64>() * dx;
        let after: f64 = heat_step(&field, dx, 0.05).unwrap().iter().sum::<f64>() * dx;
        assert!((before - after).abs() < 1e-12 * before.max(1.0), "{before} vs {after}");
    }

    #[test]
    fn kernel_semigroup() {
        let dx = 1.0 / 64.0;
        let stepped = heat_step(&sampled(0.1, dx, 8.0), dx, 0.1).unwrap();
        let target = sampled(0.2, dx, 8.0);
        let err = stepped.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "sup error {err}");
    }

    #[test]
    fn step_composition() {
        let dx = 1.0 / 32.0;
        let field: Vec<f64> = (0..384).map(|i| ((i * 7919) % 101) as f64 / 50.0 + 0.1).collect();
        let two = heat_step(&heat_step(&field, dx, 0.013).unwrap(), dx, 0.021).unwrap();
        let one = heat_step(&field, dx, 0.034).unwrap();
        let err = two.iter().zip(&one).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        assert!(two.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn rejects_non_finite_field() {
        assert!(matches!(heat_step(&[1.0, f64::NAN], 1.0, 0.1), Err(Error::NonFinite { index: 1, .. })));
    }

    /// Independent route: integrate the squared kernel differences directly.
    ///
    /// With `r = t - s` the variance is
    /// `int_0^t int (p_{r+eps}(y) - p_r(y))^2 dy dr + int_0^eps int p_r(y)^2 dy dr`.
    /// The substitution `r = u^2` removes the `r^{-1/2}` endpoint singularity;
    /// the outer integral uses composite Gauss-Legendre, the inner one the
    /// trapezoid rule on a mesh fine relative to `sqrt(r)`.
    fn quadrature_variance(t: f64, eps: f64) -> f64 {
        let p = |r: f64, y: f64| (-y * y / (2.0 * r)).exp() / (2.0 * PI * r).sqrt();
        let inner = |r: f64, f: &dyn Fn(f64) -> f64| {
            let h = r.sqrt().min((r + eps).sqrt()) / 12.0;
            let reach = 12.0 * (r + eps).sqrt();
            let n = (reach / h).ceil() as i64;
            (-n..=n).map(|j| f(j as f64 * h)).sum::<f64>() * h
        };
        let gl = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189),
            (-0.538_469_310_105_683, 0.478_628_670_499_366),
            (0.0, 0.568_888_888_888_889),
            (0.538_469_310_105_683, 0.478_628_670_499_366),
            (0.906_179_845_938_664, 0.236_926_885_056_189),
        ];
        let outer = |upper: f64, g: &dyn Fn(f64) -> f64| {
            let panels = 400;
            let w = upper.sqrt() / panels as f64;
            let mut acc = 0.0;
            for k in 0..panels {
                let mid = (k as f64 + 0.5) * w;
                for (x, wt) in gl {
                    let u = mid + 0.5 * w * x;
                    acc += wt * 0.5 * w * 2.0 * u * g(u * u);
                }
            }
            acc
        };
        let diff = outer(t, &|r| inner(r, &|y| (p(r + eps, y) - p(r, y)).powi(2)));
        let fresh = outer(eps, &|r| inner(r, &|y| p(r, y).powi(2)));
        diff + fresh
    }

    #[test]
    fn oracle_matches_quadrature() {
        for &(t, eps) in &[(1.0, 0.01), (1.0, 0.04), (0.5, 0.1)] {
            let closed = linear_increment_variance(t, eps).unwrap();
            let quad = quadrature_variance(t, eps);
            assert!((closed - quad).abs() < 1e-6 * closed, "t={t} eps={eps}: {closed} vs {quad}");
        }
        // Frozen from the quadrature route above.
        assert!((linear_increment_variance(1.0, 0.01).unwrap() - 0.079_785_0).abs() < 5e-8);
    }

    #[test]
    fn oracle_edge_values() {
        assert_eq!(linear_increment_variance(1.0, 0.0).unwrap(), 0.0);
        assert!(linear_increment_variance(1.0, -0.1).is_err());
        assert!(linear_increment_variance(0.0, 0.1).is_err());
        let ratio = linear_increment_variance(1.0, 1e-4).unwrap() / ((2.0 / PI).sqrt() * 1e-2);
        assert!((ratio - 1.0).abs() < 1e-2);
    }
}
