use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::archimedean::archimedean_height;
use crate::arith::factorize;
use crate::building::{big_det, building_distance, smith_normal_form};
use crate::format::serialize_display;
use crate::{Error, Result};

/// Local heights of a rational group element at every place.
#[derive(Debug, Clone, Serialize)]
pub struct HeightProfile {
    /// `p ↦ d_p`, listed for the primes dividing the determinant.
    pub finite_exponents: BTreeMap<u64, u32>,
    /// `Π p^{d_p}`.
    #[serde(serialize_with = "serialize_display")]
    pub h_fin: BigUint,
    pub h_inf: f64,
    pub h: f64,
    /// `Σ d_p log p + log h_inf`.
    pub log_h: f64,
    #[serde(serialize_with = "serialize_display")]
    pub det: BigInt,
    pub singular_values: Vec<f64>,
    pub ill_conditioned: bool,
}

/// Height of the class of a primitive nonsingular integer matrix.
pub fn global_height(m: &[Vec<i64>], b: f64) -> Result<HeightProfile> {
    let d = m.len();
    if d < 2 || m.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidArgument("expected a square matrix of size ≥ 2".into()));
    }
    let g = m.iter().flatten().fold(0i64, |g, &x| g.gcd(&x));
    if g != 1 {
        return Err(Error::NotPrimitive(format!("entries have common divisor {g}")));
    }
    let snf = smith_normal_form(m)?;
    let det_abs: BigInt = snf.iter().product();
    let sign = if signed_det_positive(m) { 1 } else { -1 };
    let largest = snf.last().expect("nonempty").to_u64().ok_or_else(|| {
        Error::Domain("largest elementary divisor exceeds 64 bits and cannot be factored".into())
    })?;

    let mut finite_exponents = BTreeMap::new();
    let mut h_fin = BigUint::one();
    let mut log_fin = 0.0;
    if largest > 1 {
        for (p, _) in factorize(largest)? {
            let dp = building_distance(m, p)?;
            finite_exponents.insert(p, dp);
            h_fin *= BigUint::from(p).pow(dp);
            log_fin += dp as f64 * (p as f64).ln();
        }
    }

    let real: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let arch = archimedean_height(&real, b)?;
    let log_h = log_fin + arch.log_height;
    Ok(HeightProfile {
        finite_exponents,
        h: h_fin.to_f64().unwrap_or(f64::INFINITY) * arch.height,
        h_fin,
        h_inf: arch.height,
        log_h,
        det: det_abs * sign,
        singular_values: arch.singular_values,
        ill_conditioned: arch.ill_conditioned,
    })
}

fn signed_det_positive(m: &[Vec<i64>]) -> bool {
    let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    big_det(&big) > BigInt::zero()
}

/// Primitive integer representative of the projective class of a rational
/// matrix given as `(numerator, denominator)` entries.
pub fn primitive_from_rationals(entries: &[Vec<(i64, i64)>]) -> Result<Vec<Vec<i64>>> {
    if entries.iter().flatten().any(|&(_, q)| q == 0) {
        return Err(Error::InvalidArgument("zero denominator".into()));
    }
    let lcm = entries
        .iter()
        .flatten()
        .fold(BigInt::one(), |l, &(_, q)| l.lcm(&BigInt::from(q)));
    let scaled: Vec<Vec<BigInt>> = entries
        .iter()
        .map(|r| r.iter().map(|&(a, q)| BigInt::from(a) * (&lcm / BigInt::from(q))).collect())
        .collect();
    let g = scaled.iter().flatten().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Err(Error::SingularMatrix);
    }
    scaled
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    (x / &g).to_i64().ok_or_else(|| {
                        Error::Domain("cleared matrix entries exceed 64 bits".into())
                    })
                })
                .collect()
        })
        .collect()
}
