//! The archimedean place: type `A_{d-1}` root data, the Weyl-chamber norm,
//! Cartan-integral ball volumes and heights from singular values.
//!
//! Trace-zero vectors `X ∈ R^d` model the Cartan subspace. The positive roots
//! are `X ↦ X_i - X_j` for `i < j`, all of multiplicity one, and
//! `ρ(X) = Σ_{i<j} (X_i - X_j)/2`. Volumes use Lebesgue measure on the
//! trace-zero hyperplane scaled so that `ρ` has unit length as a covector.

mod height;
mod quadrature;
mod volume;

use serde::Serialize;

use crate::{Error, Result};

pub use height::{archimedean_height, ArchimedeanHeight};
pub use quadrature::{gauss_legendre, QuadratureOptions, QuadratureResult};
pub use volume::{
    ball_volume_numeric, ball_volume_with, exponent_report, growth_exponent_fit, simplex_area,
    ExponentReport, GrowthFit,
};

/// Root data of type `A_{d-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootSystemA {
    d: usize,
}

impl RootSystemA {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Real rank `d - 1`.
    pub fn rank(&self) -> usize {
        self.d - 1
    }

    /// Positive roots as index pairs `(i, j)`, `i < j`, acting by `X_i - X_j`.
    pub fn positive_roots(&self) -> Vec<(usize, usize)> {
        (0..self.d)
            .flat_map(|i| (i + 1..self.d).map(move |j| (i, j)))
            .collect()
    }

    pub fn num_positive_roots(&self) -> usize {
        self.d * (self.d - 1) / 2
    }

    /// Coordinates `ρ_i = (d + 1 - 2i)/2` (1-based) of the half-sum of positive
    /// roots, so that `ρ(X) = Σ ρ_i X_i`.
    pub fn rho_vector(&self) -> Vec<f64> {
        (1..=self.d)
            .map(|i| (self.d as f64 + 1.0 - 2.0 * i as f64) / 2.0)
            .collect()
    }

    /// `ρ(X) = Σ_{i<j} (X_i - X_j)/2`.
    pub fn rho(&self, x: &[f64]) -> f64 {
        self.rho_vector().iter().zip(x).map(|(r, xi)| r * xi).sum()
    }

    /// Euclidean length of `ρ` as a vector in `R^d`.
    pub fn rho_length(&self) -> f64 {
        self.rho_vector().iter().map(|r| r * r).sum::<f64>().sqrt()
    }

    /// Fundamental coweights `ω_k = (1^k, 0^{d-k}) - k/d`, `k = 1..d-1`.
    /// Dominant trace-zero vectors are `Σ t_k ω_k` with `t_k = X_k - X_{k+1} ≥ 0`.
    pub fn fundamental_coweights(&self) -> Vec<Vec<f64>> {
        let d = self.d;
        (1..d)
            .map(|k| {
                (0..d)
                    .map(|i| if i < k { 1.0 } else { 0.0 } - k as f64 / d as f64)
                    .collect()
            })
            .collect()
    }
}

/// A trace-zero vector of the Cartan subspace.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ChamberVector {
    x: Vec<f64>,
}

impl ChamberVector {
    /// Accepts `x` when `|Σ x_i| ≤ 10^{-12} · max(1, Σ |x_i|)`.
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "a chamber vector needs at least two finite coordinates".into(),
            ));
        }
        let trace: f64 = x.iter().sum();
        let scale: f64 = x.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        if trace.abs() > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "vector is not trace-zero (trace {trace:e})"
            )));
        }
        Ok(Self { x })
    }

    /// Orthogonal projection of `x` onto the trace-zero hyperplane.
    pub fn project(x: &[f64]) -> Result<Self> {
        let mean = x.iter().sum::<f64>() / x.len().max(1) as f64;
        Self::new(x.iter().map(|v| v - mean).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// The Weyl-conjugate in the closed positive chamber (sorted descending).
    pub fn dominant(&self) -> Self {
        let mut x = self.x.clone();
        x.sort_by(|a, b| b.total_cmp(a));
        Self { x }
    }

    /// `X_1 ≥ X_2 ≥ … ≥ X_d` up to `tol`.
    pub fn is_dominant(&self, tol: f64) -> bool {
        self.x.windows(2).all(|w| w[0] >= w[1] - tol)
    }
}

/// The scaling constant `B > 0` of the chamber norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormParams {
    b: f64,
}

impl NormParams {
    pub fn new(b: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("B must be positive, got {b}")));
        }
        Ok(Self { b })
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// `‖X‖_B = (1/2B) Σ_{i<j} |X_i - X_j|`, a Weyl-invariant norm equal to
/// `ρ(X)/B` on dominant vectors.
pub fn norm_b(x: &ChamberVector, params: NormParams) -> f64 {
    let x = x.as_slice();
    let mut total = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            total += (x[i] - x[j]).abs();
        }
    }
    total / (2.0 * params.b)
}

/// `Π_{i<j} sinh(X_i - X_j)` on the closed positive chamber.
pub fn cartan_density(x: &ChamberVector, sys: &RootSystemA) -> Result<f64> {
    if x.dim() != sys.d() {
        return Err(Error::InvalidArgument(format!(
            "vector has {} coordinates, root system needs {}",
            x.dim(),
            sys.d()
        )));
    }
    let scale = x.as_slice().iter().map(|v| v.abs()).fold(1.0, f64::max);
    if !x.is_dominant(1e-12 * scale) {
        return Err(Error::Domain("vector lies outside the closed positive chamber".into()));
    }
    Ok(density(x.as_slice()))
}

/// `Π_{i<j} sinh(X_i - X_j)` without validation, clamped at walls.
pub(crate) fn density(x: &[f64]) -> f64 {
    let mut prod = 1.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            prod *= (x[i] - x[j]).max(0.0).sinh();
        }
    }
    prod
}
