use crate::error::{Error, Result};
use crate::path::Path;

/// Largest number of points scanned by the O(n^2) Holder sup; denser windows are decimated.
pub const HOLDER_MAX_POINTS: usize = 1 << 13;

/// `sup_{x != y in [a, b]} |f(x) - f(y)| / |x - y|^beta` over grid points.
///
/// Windows with more than [`HOLDER_MAX_POINTS`] samples are decimated by the
/// smallest integer stride that fits, so the result is a lower bound there.
pub fn holder_coefficient(path: &Path, beta: f64, interval: (f64, f64)) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, 1], got {beta}")));
    }
    let (a, b) = path.window(interval.0, interval.1)?;
    let count = b - a + 1;
    let stride = count.div_ceil(HOLDER_MAX_POINTS).max(1);
    let idx: Vec<usize> = (a..=b).step_by(stride).collect();
    let v = path.values();
    let mut best = 0.0f64;
    for (p, &i) in idx.iter().enumerate() {
        for &j in &idx[p + 1..] {
            let gap = (j - i) as f64 * path.dt();
            best = best.max((v[j] - v[i]).abs() / gap.powf(beta));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_values() {
        let c = Path::new(0.0, 0.01, vec![1.5; 101]).unwrap();
        assert_eq!(holder_coefficient(&c, 0.5, (0.0, 1.0)).unwrap(), 0.0);
        let id = Path::from_fn(0.0, 1.0 / 128.0, 128, |u| u).unwrap();
        assert!((holder_coefficient(&id, 0.5, (0.0, 1.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!(holder_coefficient(&id, 0.5, (0.5, 0.5)).is_err());
        assert!(holder_coefficient(&id, 0.0, (0.0, 1.0)).is_err());
    }

    #[test]
    fn shift_and_beta_behaviour() {
        let p = Path::from_fn(0.0, 1.0 / 256.0, 256, |u| (u * 40.0).sin() * 0.3).unwrap();
        let h = holder_coefficient(&p, 0.25, (0.0, 1.0)).unwrap();
        assert!((holder_coefficient(&p.shifted(7.0), 0.25, (0.0, 1.0)).unwrap() - h).abs() < 1e-12);
        // On a window of length <= 1 every |x - y|^beta decreases in beta.
        let mut last = 0.0;
        for beta in [0.1, 0.25, 0.5, 0.75, 1.0] {
            let v = holder_coefficient(&p, beta, (0.0, 1.0)).unwrap();
            assert!(v >= last);
            last = v;
        }
    }
}
