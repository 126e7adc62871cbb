//! Uniformly sampled scalar time series.

use crate::error::{steps_of, Error, Result};

/// Values `values[i]` at times `t0 + i dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
}

impl Path {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !t0.is_finite() {
            return Err(Error::InvalidArgument(format!("path needs finite t0 and dt > 0 (got {t0}, {dt})")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: i, index: 0 });
        }
        Ok(Path { t0, dt, values })
    }

    /// Samples `g` on `t0 + i dt`, `i = 0..=n`.
    pub fn from_fn(t0: f64, dt: f64, n: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        Path::new(t0, dt, (0..=n).map(|i| g(t0 + i as f64 * dt)).collect())
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn t(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }
    pub fn t_last(&self) -> f64 {
        self.t(self.values.len().saturating_sub(1))
    }

    /// Index of sample time `t`; `t - t0` must be a multiple of `dt`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let i = steps_of("time offset", t - self.t0, self.dt)
            .map_err(|_| Error::OutOfRange(format!("t = {t} is not a sample time of the path")))?;
        if t < self.t0 - 1e-12 || i >= self.values.len() {
            return Err(Error::OutOfRange(format!(
                "t = {t} (path covers [{}, {}])",
                self.t0,
                self.t_last()
            )));
        }
        Ok(i)
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.index_of(t)?])
    }

    /// Number of sample steps in a lag `eps`; errors unless `eps` is a positive multiple of `dt`.
    pub fn lag_steps(&self, eps: f64) -> Result<usize> {
        let m = steps_of("epsilon", eps, self.dt)?;
        if m == 0 {
            return Err(Error::InvalidArgument(format!("epsilon = {eps} must be positive")));
        }
        Ok(m)
    }

    /// Index range covering `[s, t]`.
    pub fn window(&self, s: f64, t: f64) -> Result<(usize, usize)> {
        if !(t > s) {
            return Err(Error::InvalidArgument(format!("empty interval [{s}, {t}]")));
        }
        Ok((self.index_of(s)?, self.index_of(t)?))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Path> {
        Path::new(self.t0, self.dt, self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Path {
        Path { t0: self.t0, dt: self.dt, values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn shifted(&self, c: f64) -> Path {
        Path { t0: self.t0, dt: self.dt, values: self.values.iter().map(|v| c + v).collect() }
    }

    /// Subsamples every `stride`-th point.
    pub fn decimate(&self, stride: usize) -> Path {
        let stride = stride.max(1);
        Path {
            t0: self.t0,
            dt: self.dt * stride as f64,
            values: self.values.iter().step_by(stride).copied().collect(),
        }
    }

    /// Restriction to `[s, t]`.
    pub fn restrict(&self, s: f64, t: f64) -> Result<Path> {
        let (a, b) = self.window(s, t)?;
        Ok(Path { t0: self.t(a), dt: self.dt, values: self.values[a..=b].to_vec() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_and_restriction() {
        let p = Path::from_fn(0.5, 0.25, 8, |t| t * t).unwrap();
        assert_eq!(p.len(), 9);
        assert_eq!(p.value_at(1.0).unwrap(), 1.0);
        assert!(p.value_at(1.1).is_err());
        assert!(p.value_at(3.0).is_err());
        let r = p.restrict(1.0, 2.0).unwrap();
        assert_eq!(r.values(), &[1.0, 1.5625, 2.25, 3.0625, 4.0]);
        assert_eq!(p.lag_steps(0.75).unwrap(), 3);
        assert!(p.lag_steps(0.3).is_err());
        assert!(p.lag_steps(0.0).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Path::new(0.0, 1.0, vec![0.0, f64::INFINITY]).is_err());
        assert!(Path::new(0.0, 0.0, vec![0.0]).is_err());
    }
}
