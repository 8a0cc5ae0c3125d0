use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::samples::CumulativeSamples;
use crate::{Error, Result};

/// Largest shift gap still classified as regular.
pub const REGULAR_GAP: f64 = 0.02;
/// Smallest shift gap classified as non-regular.
pub const NON_REGULAR_GAP: f64 = 0.1;
/// Shifts used when none are given.
pub const DEFAULT_EPS: [f64; 5] = [0.08, 0.04, 0.02, 0.01, 0.005];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Regular,
    NonRegular,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Regular => "regular",
            Verdict::NonRegular => "non-regular",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Tail estimates of the two shift ratios at one `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftRow {
    pub eps: f64,
    /// `min_T b(T−ε)/b(T)` over the tail.
    pub lower: f64,
    /// `max_T b(T+ε)/b(T)` over the tail.
    pub upper: f64,
    /// `max(1 − lower, upper − 1)`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    /// One row per `ε`, in decreasing `ε`.
    pub rows: Vec<ShiftRow>,
    pub tail_start: f64,
    pub tail_end: f64,
    pub tail_points: usize,
    /// Ratios linearly extrapolated to `ε = 0` from the two smallest shifts.
    pub extrapolated_lower: f64,
    pub extrapolated_upper: f64,
    /// Gap at the smallest `ε`.
    pub gap: f64,
    pub verdict: Verdict,
}

fn gap_of(lower: f64, upper: f64) -> f64 {
    (1.0 - lower).max(upper - 1.0)
}

/// Estimates `liminf_T b(T−ε)/b(T)` and `limsup_T b(T+ε)/b(T)` over the second
/// half of `t_list` for each `ε`.
///
/// Every `T ± ε` is read off the grid exactly, so each `ε` and each `T` must
/// be grid points.
pub fn regularity_report(samples: &CumulativeSamples, eps_list: &[f64], t_list: &[f64]) -> Result<RegularityReport> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("shifts must be a nonempty list of positive reals".into()));
    }
    if t_list.len() < 2 {
        return Err(Error::InvalidArgument("need at least two evaluation points".into()));
    }
    let step = samples.step();
    let eps_min = eps_list.iter().copied().fold(f64::INFINITY, f64::min);
    if step > eps_min / 10.0 * (1.0 + 1e-9) {
        return Err(Error::Resolution {
            step,
            required: eps_min / 10.0,
        });
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a));
    eps_sorted.dedup();
    let shifts: Vec<usize> = eps_sorted
        .iter()
        .map(|&e| {
            let r = e / step;
            if (r - r.round()).abs() > 1e-6 * r {
                Err(Error::InvalidArgument(format!("shift {e} is not a multiple of the grid step {step}")))
            } else {
                Ok(r.round() as usize)
            }
        })
        .collect::<Result<_>>()?;

    let mut ts = t_list.to_vec();
    ts.sort_by(f64::total_cmp);
    let tail = &ts[ts.len() / 2..];
    let k_max = shifts[0];
    let mut idx = Vec::with_capacity(tail.len());
    for &t in tail {
        if t - eps_sorted[0] < samples.t0() - 1e-12 {
            return Err(Error::InsufficientRange {
                available: samples.t0(),
                required: t - eps_sorted[0],
            });
        }
        if t + eps_sorted[0] > samples.t_end() + 1e-9 * step {
            return Err(Error::InsufficientRange {
                available: samples.t_end(),
                required: t + eps_sorted[0],
            });
        }
        let i = samples
            .grid_index(t)
            .ok_or_else(|| Error::InvalidArgument(format!("T = {t} is not a grid point")))?;
        if i < k_max || i + k_max >= samples.len() {
            return Err(Error::InsufficientRange {
                available: samples.t_end(),
                required: t + eps_sorted[0],
            });
        }
        if !(samples.values()[i] > 0.0) {
            return Err(Error::Domain(format!("b({t}) must be positive")));
        }
        idx.push(i);
    }

    let v = samples.values();
    let rows: Vec<ShiftRow> = eps_sorted
        .iter()
        .zip(&shifts)
        .map(|(&eps, &k)| {
            let lower = idx.iter().map(|&i| v[i - k] / v[i]).fold(f64::INFINITY, f64::min);
            let upper = idx.iter().map(|&i| v[i + k] / v[i]).fold(f64::NEG_INFINITY, f64::max);
            ShiftRow {
                eps,
                lower,
                upper,
                gap: gap_of(lower, upper),
            }
        })
        .collect();

    let last = rows[rows.len() - 1];
    let (extrapolated_lower, extrapolated_upper) = if rows.len() >= 2 {
        let prev = rows[rows.len() - 2];
        let lin = |a: f64, b: f64| (prev.eps * b - last.eps * a) / (prev.eps - last.eps);
        (lin(prev.lower, last.lower), lin(prev.upper, last.upper))
    } else {
        (last.lower, last.upper)
    };
    let verdict = if last.gap <= REGULAR_GAP {
        Verdict::Regular
    } else if last.gap > NON_REGULAR_GAP {
        Verdict::NonRegular
    } else {
        Verdict::Inconclusive
    };
    Ok(RegularityReport {
        rows,
        tail_start: tail[0],
        tail_end: tail[tail.len() - 1],
        tail_points: tail.len(),
        extrapolated_lower,
        extrapolated_upper,
        gap: last.gap,
        verdict,
    })
}

/// Number of vertices within distance `⌊T⌋` of a vertex in the
/// `(q+1)`-regular tree: `1 + (q+1)(q^{⌊T⌋} − 1)/(q − 1)`.
pub fn tree_ball(q: u64, t: f64) -> Result<BigUint> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("valency parameter q must be ≥ 2, got {q}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("T must be ≥ 0, got {t}")));
    }
    let k = t.floor() as u32;
    let q_big = BigUint::from(q);
    Ok(BigUint::one() + (&q_big + 1u32) * (q_big.pow(k) - 1u32) / (q - 1))
}

/// Covering of the max-norm ball of radius `T` in `R^n` by balls of radius `δ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCovering {
    pub n: u32,
    pub t: f64,
    pub delta: f64,
    #[serde(serialize_with = "crate::format::serialize_display")]
    pub count: BigUint,
    /// `[B_T:δ]·b(δ)/b(T)`.
    pub ratio: f64,
}

/// Minimal covering number `⌈T/δ⌉^n` of a box by boxes.
pub fn covering_number_box(n: u32, t: f64, delta: f64) -> Result<BoxCovering> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be ≥ 1".into()));
    }
    if !(delta > 0.0 && delta < t) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("need 0 < δ < T, got δ={delta}, T={t}")));
    }
    let x = t / delta;
    let per_axis = (x * (1.0 - 1e-12)).ceil();
    let count = BigUint::from(per_axis as u64).pow(n);
    let ratio = (per_axis / x).powi(n as i32);
    debug_assert!(count.to_f64().is_some());
    Ok(BoxCovering {
        n,
        t,
        delta,
        count,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(f: impl Fn(f64) -> f64, t_end: f64, step: f64) -> CumulativeSamples {
        let n = (t_end / step).round() as usize + 1;
        CumulativeSamples::from_fn(0.0, step, n, f).unwrap()
    }

    fn t_list(from: f64, to: f64, step: f64) -> Vec<f64> {
        let n = ((to - from) / step).round() as usize;
        (0..=n).map(|i| from + i as f64 * step).collect()
    }

    #[test]
    fn polynomial_times_exponential_is_regular() {
        let s = grid(|x| x * (2.0 * x).exp(), 20.2, 5e-4);
        let r = regularity_report(&s, &DEFAULT_EPS, &t_list(8.0, 20.0, 0.01)).unwrap();
        assert_eq!(r.verdict, Verdict::Regular);
        assert!(r.gap <= REGULAR_GAP);
        assert!((r.extrapolated_lower - 1.0).abs() < 1e-3);
        assert!((r.extrapolated_upper - 1.0).abs() < 1e-3);
        assert_eq!(r.rows.len(), 5);
        assert!(r.rows.windows(2).all(|w| w[1].gap < w[0].gap));
    }

    #[test]
    fn integer_part_exponential_is_not_regular() {
        let s = grid(|x| (x + 1e-9).floor().exp(), 20.2, 5e-4);
        let r = regularity_report(&s, &DEFAULT_EPS, &t_list(8.0, 20.0, 5e-4)).unwrap();
        assert_eq!(r.verdict, Verdict::NonRegular);
        let last = r.rows.last().unwrap();
        assert!((last.lower - (-1f64).exp()).abs() < 1e-12);
        assert!((last.upper - 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn tree_balls_are_not_regular() {
        let s = grid(|x| tree_ball(2, x + 1e-9).unwrap().to_f64().unwrap(), 20.2, 5e-4);
        let r = regularity_report(&s, &DEFAULT_EPS, &t_list(8.0, 20.0, 5e-4)).unwrap();
        assert_eq!(r.verdict, Verdict::NonRegular);
        let lower = r.rows.last().unwrap().lower;
        assert!((lower - 0.5).abs() < 0.01, "{lower}");
    }

    #[test]
    fn report_errors() {
        let s = grid(|x| x.exp(), 10.0, 0.01);
        assert!(matches!(
            regularity_report(&s, &[0.05], &[5.0, 6.0]),
            Err(Error::Resolution { .. })
        ));
        assert!(matches!(
            regularity_report(&s, &[0.1], &[5.0, 9.95]),
            Err(Error::InsufficientRange { .. })
        ));
        assert!(regularity_report(&s, &[0.105], &[5.0, 6.0]).is_err());
        assert!(regularity_report(&s, &[0.1], &[5.0, 6.005]).is_err());
        assert!(regularity_report(&s, &[], &[5.0, 6.0]).is_err());
    }

    #[test]
    fn tree_ball_examples() {
        assert_eq!(tree_ball(2, 0.5).unwrap(), BigUint::from(1u32));
        assert_eq!(tree_ball(2, 1.0).unwrap(), BigUint::from(4u32));
        assert_eq!(tree_ball(2, 3.0).unwrap(), BigUint::from(22u32));
        assert_eq!(tree_ball(3, 2.7).unwrap(), BigUint::from(17u32));
        assert!(tree_ball(1, 2.0).is_err());
    }

    #[test]
    fn tree_ball_matches_breadth_first_search() {
        for q in 2u64..=4 {
            let mut frontier = 1u64;
            let mut total = 1u64;
            for k in 1..=8u32 {
                frontier *= if k == 1 { q + 1 } else { q };
                total += frontier;
                assert_eq!(tree_ball(q, k as f64).unwrap(), BigUint::from(total));
            }
        }
    }

    #[test]
    fn box_coverings() {
        let c = covering_number_box(1, 1.0, 0.1).unwrap();
        assert_eq!(c.count, BigUint::from(10u32));
        assert!((c.ratio - 1.0).abs() < 1e-12);
        let c = covering_number_box(2, 1.0, 0.25).unwrap();
        assert_eq!(c.count, BigUint::from(16u32));
        assert!((c.ratio - 1.0).abs() < 1e-12);
        let c = covering_number_box(2, 1.0, 0.3).unwrap();
        assert_eq!(c.count, BigUint::from(16u32));
        assert!((c.ratio - 1.44).abs() < 1e-12);
        let ratios: Vec<f64> = [0.5, 0.25, 0.125, 0.0625]
            .iter()
            .map(|&dl| covering_number_box(3, 1.0, dl).unwrap().ratio)
            .collect();
        assert!(ratios.iter().all(|r| (r - 1.0).abs() < 1e-12));
        assert!(covering_number_box(2, 1.0, 1.0).is_err());
        assert!(covering_number_box(2, 1.0, 0.0).is_err());
    }
}
