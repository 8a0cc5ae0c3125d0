use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::archimedean::{ball_volume_numeric, simplex_area};
use crate::dirichlet::{coeff_sieve_with, CoeffTable, DEFAULT_SIEVE_LIMIT};
use crate::format::serialize_display;
use crate::samples::CumulativeSamples;
use crate::{Error, Result};

/// Grid step of the memoized archimedean ball volume.
pub const ARCH_TABLE_STEP: f64 = 1e-3;

const TABLE_MESH: usize = 4;

/// `b^∞(t)` on the grid `t = i·step`, linearly interpolated in between.
#[derive(Debug, Clone)]
pub struct ArchimedeanTable {
    d: usize,
    b: f64,
    samples: CumulativeSamples,
}

impl ArchimedeanTable {
    /// Table on `[0, t_max]` with step [`ARCH_TABLE_STEP`].
    pub fn new(d: usize, b: f64, t_max: f64) -> Result<Self> {
        Self::with_step(d, b, t_max, ARCH_TABLE_STEP)
    }

    pub fn with_step(d: usize, b: f64, t_max: f64, step: f64) -> Result<Self> {
        simplex_area(d)?;
        if !(t_max >= 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidArgument(format!("table range must be ≥ 0, got {t_max}")));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidArgument(format!("table step must be positive, got {step}")));
        }
        let n = (t_max / step - 1e-9).ceil().max(1.0) as usize + 1;
        let values = (0..n)
            .into_par_iter()
            .map(|i| ball_volume_numeric(d, b, i as f64 * step, TABLE_MESH))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            d,
            b,
            samples: CumulativeSamples::new(0.0, step, values)?,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn samples(&self) -> &CumulativeSamples {
        &self.samples
    }

    /// `b^∞(t)`, zero for `t ≤ 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        self.samples.interpolate(t)
    }
}

/// One summand `D(m)·b^∞(T − log m)` of the adelic ball volume.
#[derive(Debug, Clone, Serialize)]
pub struct VolumeComponent {
    pub m: u64,
    #[serde(serialize_with = "serialize_display")]
    pub d_m: BigUint,
    pub b_inf: f64,
}

fn largest_m(t: f64) -> u64 {
    (t.exp() * (1.0 + 1e-12)).floor() as u64
}

fn sieve_for(d: usize, t: f64, sieve_limit: u64) -> Result<CoeffTable> {
    let x = largest_m(t).max(1);
    if x > sieve_limit {
        return Err(Error::BudgetExceeded {
            what: "coefficient sieve",
            estimated: x as u128,
            limit: sieve_limit as u128,
        });
    }
    coeff_sieve_with(d, x, sieve_limit)
}

fn direct_sum(coeffs: &CoeffTable, table: &ArchimedeanTable, t: f64) -> Result<f64> {
    let m_max = largest_m(t).min(coeffs.x_max());
    let chunk = 4096u64;
    let partials = (0..m_max.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut sum = 0.0;
            for m in c * chunk + 1..=((c + 1) * chunk).min(m_max) {
                let w = table.eval(t - (m as f64).ln())?;
                if w > 0.0 {
                    sum += coeffs.get(m).and_then(|v| v.to_f64()).unwrap_or(f64::INFINITY) * w;
                }
            }
            Ok(sum)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(partials.iter().sum())
}

/// `b(T) = Σ_{m ≤ e^T} D(m) b^∞(T − log m)` by direct summation.
pub fn adelic_ball_volume(d: usize, b: f64, t: f64) -> Result<f64> {
    adelic_ball_volume_with(d, b, t, DEFAULT_SIEVE_LIMIT)
}

/// [`adelic_ball_volume`] with an explicit bound on the sieve length.
pub fn adelic_ball_volume_with(d: usize, b: f64, t: f64, sieve_limit: u64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t}")));
    }
    let coeffs = sieve_for(d, t, sieve_limit)?;
    let table = ArchimedeanTable::new(d, b, t)?;
    direct_sum(&coeffs, &table, t)
}

/// `b(T)` on the grid `T_i = i·step`, `0 < T_i ≤ T_max`.
#[derive(Debug, Clone, Serialize)]
pub struct BallVolumeSeries {
    pub d: usize,
    pub b: f64,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(skip)]
    coeffs: CoeffTable,
    #[serde(skip)]
    table: ArchimedeanTable,
}

impl BallVolumeSeries {
    /// Summands of `b(T)` for `m ≤ e^T`, `m` ascending.
    pub fn components(&self, t: f64) -> Result<Vec<VolumeComponent>> {
        if t > *self.t_grid.last().unwrap_or(&0.0) + 1e-9 {
            return Err(Error::InsufficientRange {
                available: *self.t_grid.last().unwrap_or(&0.0),
                required: t,
            });
        }
        let mut out = Vec::new();
        for m in 1..=largest_m(t).min(self.coeffs.x_max()) {
            out.push(VolumeComponent {
                m,
                d_m: self.coeffs.get(m).expect("sieved").clone(),
                b_inf: self.table.eval(t - (m as f64).ln())?,
            });
        }
        Ok(out)
    }

    /// `b(T)` by direct summation, independent of the convolution.
    pub fn direct(&self, t: f64) -> Result<f64> {
        direct_sum(&self.coeffs, &self.table, t)
    }

    /// The series as cumulative samples with `b(0) = 0` prepended.
    pub fn to_samples(&self) -> Result<CumulativeSamples> {
        let step = self.t_grid[0];
        let mut values = Vec::with_capacity(self.values.len() + 1);
        values.push(0.0);
        values.extend_from_slice(&self.values);
        CumulativeSamples::new(0.0, step, values)
    }
}

/// [`BallVolumeSeries`] on `T_i = i·step` up to `t_max`.
///
/// The archimedean table has step `h = min(step, ARCH_TABLE_STEP)` and `step`
/// must be a multiple of `h`. With `log m = (j + f)·h`
/// the interpolated `b^∞(T_i − log m)` equals `f·g[I−j−1] + (1−f)·g[I−j]` on
/// table values `g`, so the sum over `m` collapses to two weight vectors
/// indexed by `j` and a discrete convolution that reproduces direct summation.
pub fn adelic_ball_series(d: usize, b: f64, t_max: f64, step: f64, sieve_limit: u64) -> Result<BallVolumeSeries> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!("T_max must be positive, got {t_max}")));
    }
    let h = step.min(ARCH_TABLE_STEP);
    let ratio = step / h;
    let k = ratio.round();
    if !(step > 0.0) || k < 1.0 || (ratio - k).abs() > 1e-6 * k {
        return Err(Error::InvalidArgument(format!(
            "step must be a positive multiple of {ARCH_TABLE_STEP} or below it, got {step}"
        )));
    }
    let k = k as usize;
    let n_t = ((t_max / step) + 1e-9).floor() as usize;
    if n_t == 0 {
        return Err(Error::InvalidArgument(format!("T_max {t_max} is below one step {step}")));
    }
    let i_max = n_t * k;
    let t_top = i_max as f64 * h;
    let coeffs = sieve_for(d, t_top, sieve_limit)?;
    let table = ArchimedeanTable::with_step(d, b, t_top, h)?;
    let g = table.samples().values();

    let mut whole = vec![0.0; i_max + 1];
    let mut shifted = vec![0.0; i_max + 1];
    for m in 1..=largest_m(t_top).min(coeffs.x_max()) {
        let x = (m as f64).ln() / h;
        let j = x.floor() as usize;
        if j > i_max {
            break;
        }
        let f = x - j as f64;
        let dm = coeffs.get(m).and_then(|v| v.to_f64()).unwrap_or(f64::INFINITY);
        whole[j] += dm * (1.0 - f);
        shifted[j] += dm * f;
    }

    let values: Vec<f64> = (1..=n_t)
        .into_par_iter()
        .map(|i| {
            let top = i * k;
            let mut sum = 0.0;
            for j in 0..=top {
                sum += whole[j] * g[top - j];
                if j < top {
                    sum += shifted[j] * g[top - j - 1];
                }
            }
            sum
        })
        .collect();
    Ok(BallVolumeSeries {
        d,
        b,
        t_grid: (1..=n_t).map(|i| (i * k) as f64 * h).collect(),
        values,
        coeffs,
        table,
    })
}
