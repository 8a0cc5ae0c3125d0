use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::archimedean::simplex_area;
use crate::building::{c_param, BuildingParams};
use crate::dirichlet::{l_closed_pgl2, l_euler};
use crate::{Error, Result};

/// Prime cutoff of the Euler product behind the constant `C`.
pub const PREDICTION_CUTOFF: u64 = 100_000;

/// One exponent convention `N(T) ≈ a·C·(BT)^{r−1}·e^{E·T}/covolume`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledPrediction {
    pub label: &'static str,
    pub exponent: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub d: usize,
    pub b: f64,
    pub t: f64,
    pub covolume: f64,
    pub rank: usize,
    /// `F(1)` of the Weyl-chamber slice.
    pub a: f64,
    /// `L(B)`.
    pub c: f64,
    pub c_source: &'static str,
    /// `(BT)^{r−1}`.
    pub poly_factor: f64,
    /// `log c(2) / log 2`, the abscissa of convergence of `L`.
    pub b0: f64,
    pub conventions: [LabeledPrediction; 2],
    pub warning: Option<String>,
}

/// The counting asymptotic `a·C·(BT)^{r−1}·e^{E·T}/covolume` with `E = B` and
/// `E = 2B` side by side.
pub fn prediction_n(d: usize, b: f64, t: f64, covolume: f64) -> Result<Prediction> {
    let a = simplex_area(d)?;
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("B must be positive, got {b}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("T must be ≥ 0, got {t}")));
    }
    if !(covolume > 0.0) || !covolume.is_finite() {
        return Err(Error::InvalidArgument(format!("covolume must be positive, got {covolume}")));
    }
    let s = Complex64::new(b, 0.0);
    let (c, c_source) = if d == 2 {
        (l_closed_pgl2(s)?.re, "closed form ζ(B)ζ(B−1)/ζ(2B)")
    } else {
        (l_euler(d, s, PREDICTION_CUTOFF)?.value.re, "Euler product")
    };
    let b0 = c_param(BuildingParams::new(d, 2)?).to_f64().unwrap_or(f64::INFINITY).ln() / 2f64.ln();
    let rank = d - 1;
    let poly_factor = (b * t).powi(rank as i32 - 1);
    let base = a * c * poly_factor / covolume;
    let warning = (b <= b0).then(|| {
        format!("B = {b} does not exceed the abscissa B0 = {b0:.6}; the asymptotic is not established there")
    });
    Ok(Prediction {
        d,
        b,
        t,
        covolume,
        rank,
        a,
        c,
        c_source,
        poly_factor,
        b0,
        conventions: [
            LabeledPrediction {
                label: "E=B",
                exponent: b,
                value: base * (b * t).exp(),
            },
            LabeledPrediction {
                label: "E=2B",
                exponent: 2.0 * b,
                value: base * (2.0 * b * t).exp(),
            },
        ],
        warning,
    })
}
