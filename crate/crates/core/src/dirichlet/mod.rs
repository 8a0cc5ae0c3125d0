//! The Dirichlet series `L(s) = Σ D(m) m^{-s}` attached to building spheres.
//!
//! `D` is multiplicative with `D(p^k) = D(p) c(p)^{k-1}`, so
//!
//! ```text
//! L(s) = Π_p (1 - [c(p) - D(p)] p^{-s}) / (1 - c(p) p^{-s}),
//! ```
//!
//! which converges for `Re(s) > d`. For `d = 2` it equals
//! `ζ(s) ζ(s-1) / ζ(2s)`; the `SL_2` orbit series equals
//! `ζ(2s-2) ζ(2s-1) / ζ(4s-2)`.

mod lseries;
mod poles;
mod residue;
mod sieve;
mod zeta;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::building::{c_param, d_param, BuildingParams};
use crate::Result;

pub use lseries::{
    l_closed_pgl2, l_closed_sl2, l_euler, l_euler_kind, l_euler_sl2, LSeriesValue, SeriesKind,
};
pub use poles::{pole_abscissas, poles_table, PoleRow, PoleTable};
pub use residue::{residue_estimate, ResidueEstimate, ResidueVariant};
pub use sieve::{
    coeff_d, coeff_sieve, coeff_sieve_with, partial_sum, CoeffTable, DEFAULT_SIEVE_LIMIT,
};
pub use zeta::{zeta, zeta_em, ZETA_MARGIN};

/// The Euler-factor data `c(p)` and `D(p)` at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerFactorParams {
    d: usize,
    p: u64,
    #[serde(serialize_with = "crate::format::serialize_display")]
    c_p: BigUint,
    #[serde(serialize_with = "crate::format::serialize_display")]
    d_p: BigUint,
}

impl EulerFactorParams {
    pub fn new(d: usize, p: u64) -> Result<Self> {
        let params = BuildingParams::new(d, p)?;
        Ok(Self {
            d,
            p,
            c_p: c_param(params),
            d_p: d_param(params),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `c(p) = (d-1) p^{d-1} + p^{d-2} + … + p`.
    pub fn c_p(&self) -> &BigUint {
        &self.c_p
    }

    /// `D(p) = (d-1)(p^d - 1)/(p - 1)`.
    pub fn d_p(&self) -> &BigUint {
        &self.d_p
    }

    /// `c(p) - D(p)`, the numerator coefficient of the Euler factor.
    pub fn numerator_coeff(&self) -> BigInt {
        BigInt::from(self.c_p.clone()) - BigInt::from(self.d_p.clone())
    }
}
