use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::EulerFactorParams;
use crate::arith::{factorize, smallest_prime_factors};
use crate::building::{sphere_size, BuildingParams};
use crate::{Error, Result};

/// Default largest table size accepted by [`coeff_sieve`].
pub const DEFAULT_SIEVE_LIMIT: u64 = 1_000_000;

/// `D(m) = Π D(p^k)` over the prime-power factorization of `m ≤ 10^12`.
pub fn coeff_d(d: usize, m: u64) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::InvalidArgument("D(m) needs m ≥ 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    factorize(m)?
        .into_iter()
        .try_fold(BigUint::one(), |acc, (p, k)| {
            Ok(acc * sphere_size(BuildingParams::new(d, p)?, k))
        })
}

/// The coefficients `D(1), …, D(x_max)`, immutable after construction.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    d: usize,
    values: Vec<BigUint>,
}

impl CoeffTable {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn x_max(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    /// `D(m)` for `1 ≤ m ≤ x_max`.
    pub fn get(&self, m: u64) -> Option<&BigUint> {
        if m == 0 {
            return None;
        }
        self.values.get(m as usize)
    }

    /// `D(1), …, D(x_max)` in order.
    pub fn values(&self) -> &[BigUint] {
        &self.values[1..]
    }

    /// `Σ_{m ≤ x} D(m) m^{-b}` with Neumaier-compensated summation.
    pub fn partial_sum(&self, b: f64, x: u64) -> Result<f64> {
        if x > self.x_max() {
            return Err(Error::InvalidArgument(format!(
                "partial sum up to {x} exceeds the table size {}",
                self.x_max()
            )));
        }
        let mut acc = NeumaierSum::default();
        for m in 1..=x {
            acc.add(self.weight(m, b));
        }
        Ok(acc.value())
    }

    /// Partial sums at every `x` in `xs` (nondecreasing), one pass over the table.
    pub fn partial_sums(&self, b: f64, xs: &[u64]) -> Result<Vec<f64>> {
        if xs.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument("x values must be nondecreasing".into()));
        }
        if let Some(&last) = xs.last() {
            if last > self.x_max() {
                return Err(Error::InvalidArgument(format!(
                    "partial sum up to {last} exceeds the table size {}",
                    self.x_max()
                )));
            }
        }
        let mut acc = NeumaierSum::default();
        let mut m = 0;
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            while m < x {
                m += 1;
                acc.add(self.weight(m, b));
            }
            out.push(acc.value());
        }
        Ok(out)
    }

    /// `D(m) m^{-b}` in double precision.
    pub fn weight(&self, m: u64, b: f64) -> f64 {
        let dm = self.values[m as usize].to_f64().unwrap_or(f64::INFINITY);
        dm * (m as f64).powf(-b)
    }
}

#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// [`coeff_sieve_with`] under [`DEFAULT_SIEVE_LIMIT`].
pub fn coeff_sieve(d: usize, x_max: u64) -> Result<CoeffTable> {
    coeff_sieve_with(d, x_max, DEFAULT_SIEVE_LIMIT)
}

/// Fill `D(m)` for `m ≤ x_max` with a smallest-prime-factor sieve.
///
/// Prime powers use `D(p^k) = D(p^{k-1}) c(p)`; other `m = p^k r` with
/// `p ∤ r` use `D(m) = D(p^k) D(r)`.
pub fn coeff_sieve_with(d: usize, x_max: u64, limit: u64) -> Result<CoeffTable> {
    if x_max == 0 {
        return Err(Error::InvalidArgument("x_max must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    if x_max > limit {
        return Err(Error::BudgetExceeded {
            what: "coefficient sieve entries",
            estimated: x_max as u128,
            limit: limit as u128,
        });
    }
    let n = x_max as usize;
    let spf = smallest_prime_factors(n);
    // prime_power[m]: largest power of spf(m) dividing m
    let mut prime_power = vec![0u32; n + 1];
    let mut c_of: Vec<Option<BigUint>> = vec![None; n + 1];
    let mut values = vec![BigUint::one(); n + 1];
    for m in 2..=n {
        let p = spf[m] as usize;
        let rest = m / p;
        prime_power[m] = if rest.is_multiple_of(p) {
            prime_power[rest] * p as u32
        } else {
            p as u32
        };
        let q = prime_power[m] as usize;
        values[m] = if q == m {
            if rest == 1 {
                let params = EulerFactorParams::new(d, p as u64)?;
                c_of[p] = Some(params.c_p().clone());
                params.d_p().clone()
            } else {
                let c = c_of[p].as_ref().expect("c(p) is set when p is reached");
                &values[rest] * c
            }
        } else {
            &values[q] * &values[m / q]
        };
    }
    Ok(CoeffTable { d, values })
}

/// `Σ_{m ≤ x} D(m) m^{-b}` from a fresh sieve (default memory guard).
pub fn partial_sum(d: usize, b: f64, x: u64) -> Result<f64> {
    if !(b >= 0.0) {
        return Err(Error::InvalidArgument(format!("exponent must be ≥ 0, got {b}")));
    }
    coeff_sieve(d, x.max(1))?.partial_sum(b, x)
}
