use crate::error::{Error, Result};
use crate::path::Path;

/// `V_{alpha,eps}(g) = sum over u in [s+eps, t] ∩ eps Z of |g(u) - g(u-eps)|^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationResult {
    pub alpha: f64,
    pub epsilon: f64,
    pub interval: (f64, f64),
    pub value: f64,
    pub terms: usize,
}

pub fn alpha_variation(path: &Path, alpha: f64, epsilon: f64, interval: (f64, f64)) -> Result<VariationResult> {
    let (s, t) = interval;
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let lag = path.lag_steps(epsilon)?;
    path.window(s, t)?;
    if epsilon > t - s + 1e-12 {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} exceeds interval length {}", t - s)));
    }
    // u = k eps for k in ceil((s + eps)/eps) ..= floor(t/eps)
    let k_first = ((s + epsilon) / epsilon - 1e-9).ceil() as i64;
    let k_last = (t / epsilon + 1e-9).floor() as i64;
    let values = path.values();
    // Repeated multiplication keeps power-of-two rescaling exact.
    let integer_power = alpha.fract() == 0.0 && alpha <= 16.0;
    let mut value = 0.0;
    let mut terms = 0;
    for k in k_first..=k_last {
        let i = path.index_of(k as f64 * epsilon)?;
        let d = (values[i] - values[i - lag]).abs();
        value += if integer_power { d.powi(alpha as i32) } else { d.powf(alpha) };
        terms += 1;
    }
    Ok(VariationResult { alpha, epsilon, interval, value, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_path_has_zero_variation() {
        let p = Path::new(0.0, 0.125, vec![3.0; 17]).unwrap();
        assert_eq!(alpha_variation(&p, 4.0, 0.25, (0.0, 2.0)).unwrap().value, 0.0);
    }

    #[test]
    fn identity_path() {
        let p = Path::from_fn(0.0, 1.0 / 16.0, 16, |u| u).unwrap();
        let r = alpha_variation(&p, 1.0, 0.25, (0.0, 1.0)).unwrap();
        assert_eq!(r.terms, 4);
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lattice_is_anchored_at_zero() {
        // [0.3, 1] with eps = 0.25: u in {0.75, 1.0}
        let p = Path::from_fn(0.0, 0.05, 20, |u| u * u).unwrap();
        let r = alpha_variation(&p, 2.0, 0.25, (0.3, 1.0)).unwrap();
        assert_eq!(r.terms, 2);
        let want = (0.75f64.powi(2) - 0.25).powi(2) + (1.0 - 0.75f64.powi(2)).powi(2);
        assert!((r.value - want).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        let p = Path::from_fn(0.0, 0.01, 200, |u| u).unwrap();
        assert!(matches!(alpha_variation(&p, 4.0, 0.015, (0.0, 1.0)), Err(Error::NotGridMultiple { .. })));
        assert!(alpha_variation(&p, 4.0, 0.02, (0.0, 3.0)).is_err());
        assert!(alpha_variation(&p, 4.0, 0.5, (0.0, 0.2)).is_err());
        assert!(alpha_variation(&p, 0.0, 0.02, (0.0, 1.0)).is_err());
    }

    proptest! {
        #[test]
        fn homogeneous_of_degree_alpha(c in -5.0f64..5.0, alpha in 0.5f64..6.0, seed in 0u64..1000) {
            let p = Path::from_fn(0.0, 1.0 / 64.0, 128, |u| ((u * 37.0 + seed as f64).sin() * 3.0).fract()).unwrap();
            let base = alpha_variation(&p, alpha, 1.0 / 16.0, (0.0, 2.0)).unwrap().value;
            let scaled = alpha_variation(&p.scaled(c), alpha, 1.0 / 16.0, (0.0, 2.0)).unwrap().value;
            let want = c.abs().powf(alpha) * base;
            prop_assert!((scaled - want).abs() <= 1e-12 * want.max(1e-300));
        }
    }
}
