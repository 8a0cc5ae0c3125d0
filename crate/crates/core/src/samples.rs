//! Cumulative functions sampled on a uniform grid.

use serde::Serialize;

use crate::{Error, Result};

/// Values `b(t_0 + i·step)`, `i = 0..n`, of a cumulative (nondecreasing)
/// function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeSamples {
    t0: f64,
    step: f64,
    values: Vec<f64>,
}

impl CumulativeSamples {
    pub fn new(t0: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !t0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid needs a finite start and a positive step, got t0={t0}, step={step}"
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("samples must not be NaN".into()));
        }
        Ok(Self { t0, step, values })
    }

    /// Samples `f` at `t0 + i·step` for `i = 0..n`.
    pub fn from_fn(t0: f64, step: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..n).map(|i| f(t0 + i as f64 * step)).collect();
        Self::new(t0, step, values)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last grid point.
    pub fn t_end(&self) -> f64 {
        self.t(self.values.len() - 1)
    }

    /// Grid point `i`.
    pub fn t(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.step
    }

    /// Index of the grid point nearest to `t`, if `t` lies on the grid to
    /// within `10^{-6}` steps.
    pub fn grid_index(&self, t: f64) -> Option<usize> {
        let x = (t - self.t0) / self.step;
        let i = x.round();
        if (x - i).abs() > 1e-6 || i < 0.0 || i as usize >= self.values.len() {
            return None;
        }
        Some(i as usize)
    }

    /// `true` when no sample is smaller than its predecessor.
    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// Linear interpolation; 0 left of the grid, an error right of it.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        if t <= self.t0 {
            return Ok(if t < self.t0 { 0.0 } else { self.values[0] });
        }
        let x = (t - self.t0) / self.step;
        let last = self.values.len() - 1;
        if x > last as f64 + 1e-9 {
            return Err(Error::InsufficientRange {
                available: self.t_end(),
                required: t,
            });
        }
        let nearest = x.round();
        if (x - nearest).abs() < 1e-9 {
            return Ok(self.values[(nearest as usize).min(last)]);
        }
        let i = x.floor() as usize;
        let f = x - i as f64;
        Ok(self.values[i] * (1.0 - f) + self.values[i + 1] * f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation() {
        let s = CumulativeSamples::from_fn(0.0, 0.5, 5, |t| t * t).unwrap();
        assert_eq!(s.t_end(), 2.0);
        assert_eq!(s.interpolate(-1.0).unwrap(), 0.0);
        assert_eq!(s.interpolate(0.5).unwrap(), 0.25);
        assert_eq!(s.interpolate(0.75).unwrap(), 0.625);
        assert_eq!(s.interpolate(2.0).unwrap(), 4.0);
        assert!(matches!(s.interpolate(2.1), Err(Error::InsufficientRange { .. })));
        assert!(s.is_nondecreasing());
    }

    #[test]
    fn grid_lookup() {
        let s = CumulativeSamples::from_fn(1.0, 0.001, 2001, |t| t).unwrap();
        assert_eq!(s.grid_index(1.5), Some(500));
        assert_eq!(s.grid_index(3.0), Some(2000));
        assert_eq!(s.grid_index(1.0005), None);
        assert_eq!(s.grid_index(0.5), None);
    }

    #[test]
    fn validation() {
        assert!(CumulativeSamples::new(0.0, 0.0, vec![1.0, 2.0]).is_err());
        assert!(CumulativeSamples::new(0.0, 1.0, vec![1.0]).is_err());
        assert!(CumulativeSamples::new(0.0, 1.0, vec![1.0, f64::NAN]).is_err());
    }
}
