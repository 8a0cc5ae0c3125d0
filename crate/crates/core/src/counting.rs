//! Exhaustive enumeration of `PGL_2(Q)` elements of bounded height.
//!
//! Every element has a unique primitive integer representative whose first
//! nonzero entry (row-major) is positive. For such a representative the
//! finite height is `|det|` and the archimedean height is
//! `(σ_1/σ_2)^{1/(2B)}`, so `h ≤ x` bounds the largest singular value and
//! with it every entry (see [`entry_bound`]).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::adelic::{adelic_ball_volume, global_height, HeightProfile};
use crate::archimedean::{ball_volume_numeric, gauss_legendre};
use crate::arith::factorize;
use crate::building::{building_distance, enumerate_classes, BuildingParams, LatticeClass};
use crate::{Error, Result};

/// Default bound on the number of matrices visited, `(2N+1)^4`.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1_000_000_000;
/// Relative distance to the threshold below which a height is reported as a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;
/// Shift `ε` of the sandwich columns `b(log x ∓ ε)`.
pub const SANDWICH_EPS: f64 = 0.25;

/// Canonical representative of an element of `PGL_2(Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElementQ {
    m: [[i64; 2]; 2],
}

impl GroupElementQ {
    /// Normalizes a nonsingular integer matrix to its primitive representative
    /// with positive first nonzero entry.
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] as i128 * m[1][1] as i128 - m[0][1] as i128 * m[1][0] as i128;
        if det == 0 {
            return Err(Error::SingularMatrix);
        }
        let g = m.iter().flatten().fold(0i64, |g, &x| g.gcd(&x));
        let first = *m.iter().flatten().find(|&&x| x != 0).expect("nonsingular");
        let s = if first > 0 { g } else { -g };
        Ok(Self {
            m: [[m[0][0] / s, m[0][1] / s], [m[1][0] / s, m[1][1] / s]],
        })
    }

    fn is_canonical(m: &[[i64; 2]; 2]) -> bool {
        if m[0][0] * m[1][1] == m[0][1] * m[1][0] {
            return false;
        }
        let first = *m.iter().flatten().find(|&&x| x != 0).expect("nonsingular");
        first > 0 && m.iter().flatten().fold(0i64, |g, &x| g.gcd(&x)) == 1
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.m
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.m.iter().map(|r| r.to_vec()).collect()
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `h = |det|·t^{1/(2B)}` with `t = σ_1/σ_2` the root `≥ 1` of
    /// `t + 1/t = ‖M‖_F² / |det|`.
    pub fn height(&self, b: f64) -> f64 {
        let det = self.det().unsigned_abs() as f64;
        let frob: f64 = self.m.iter().flatten().map(|&x| (x as f64) * (x as f64)).sum();
        let q = frob / det;
        let t = (q + ((q - 2.0) * (q + 2.0)).max(0.0).sqrt()) / 2.0;
        det * t.powf(1.0 / (2.0 * b))
    }

    /// Full height profile through the general adelic machinery.
    pub fn profile(&self, b: f64) -> Result<HeightProfile> {
        global_height(&self.rows(), b)
    }
}

/// An integer `N` such that every element with `h ≤ x` has all entries of its
/// canonical representative in `[−N, N]`.
///
/// With `e = |det| = h_fin` and `σ_1/σ_2 ≤ (x/e)^{2B}` one gets
/// `σ_1² = e·σ_1/σ_2 ≤ e·(x/e)^{2B}`; entries are bounded by `σ_1`, and
/// `e` ranges over the integers in `[1, x]`.
pub fn entry_bound(x: f64, b: f64) -> Result<u64> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x must be ≥ 1, got {x}")));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("B must be positive, got {b}")));
    }
    let e_max = (x * (1.0 + 1e-12)).floor() as u64;
    let best = (1..=e_max)
        .map(|e| {
            let e = e as f64;
            (e * (x / e).powf(2.0 * b)).sqrt()
        })
        .fold(0.0, f64::max);
    Ok((best + 1e-9).floor() as u64)
}

fn check_budget(bound: u64, limit: u128) -> Result<()> {
    if bound == 0 {
        return Err(Error::InvalidArgument("entry bound must be ≥ 1".into()));
    }
    let side = 2 * bound as u128 + 1;
    let cells = side.checked_pow(4).unwrap_or(u128::MAX);
    if cells > limit {
        return Err(Error::BudgetExceeded {
            what: "matrix enumeration",
            estimated: cells,
            limit,
        });
    }
    Ok(())
}

/// Canonical elements with first entry `a` and all entries in `[−N, N]`, in
/// lexicographic order.
fn slice(bound: u64, a: i64) -> Vec<GroupElementQ> {
    let n = bound as i64;
    let mut out = Vec::new();
    for b in -n..=n {
        for c in -n..=n {
            for d in -n..=n {
                let m = [[a, b], [c, d]];
                if GroupElementQ::is_canonical(&m) {
                    out.push(GroupElementQ { m });
                }
            }
        }
    }
    out
}

/// Lexicographic stream of all canonical elements with entries in `[−N, N]`.
#[derive(Debug, Clone)]
pub struct Elements {
    bound: i64,
    next: Option<[i64; 4]>,
}

impl Iterator for Elements {
    type Item = GroupElementQ;

    fn next(&mut self) -> Option<GroupElementQ> {
        loop {
            let cur = self.next?;
            let mut succ = cur;
            let mut k = 3;
            self.next = loop {
                if succ[k] < self.bound {
                    succ[k] += 1;
                    break Some(succ);
                }
                succ[k] = -self.bound;
                if k == 0 {
                    break None;
                }
                k -= 1;
            };
            let m = [[cur[0], cur[1]], [cur[2], cur[3]]];
            if GroupElementQ::is_canonical(&m) {
                return Some(GroupElementQ { m });
            }
        }
    }
}

/// [`enumerate_elements_with`] at [`DEFAULT_ENUMERATION_LIMIT`].
pub fn enumerate_elements(bound: u64) -> Result<Elements> {
    enumerate_elements_with(bound, DEFAULT_ENUMERATION_LIMIT)
}

/// Each canonical element with entries in `[−N, N]` exactly once.
pub fn enumerate_elements_with(bound: u64, limit: u128) -> Result<Elements> {
    check_budget(bound, limit)?;
    let n = bound as i64;
    Ok(Elements {
        bound: n,
        next: Some([-n; 4]),
    })
}

/// Element whose height lies within [`TIE_TOLERANCE`] of a threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tie {
    pub x: f64,
    pub element: [[i64; 2]; 2],
    pub height: f64,
}

/// `π(x) = #{γ : h(γ) ≤ x}` for several thresholds from one enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiCounts {
    pub b: f64,
    pub x_grid: Vec<f64>,
    pub counts: Vec<u64>,
    pub entry_bound: u64,
    /// Near-threshold heights, all counted as `h ≤ x`.
    pub ties: Vec<Tie>,
}

fn heights_in_box(bound: u64, b: f64, cap: f64) -> Vec<(GroupElementQ, f64)> {
    let n = bound as i64;
    (-n..=n)
        .into_par_iter()
        .map(|a| {
            slice(bound, a)
                .into_iter()
                .filter_map(|g| {
                    let h = g.height(b);
                    (h <= cap).then_some((g, h))
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

/// Counts for every `x` in `xs` by enumeration at `bound` (or at
/// `entry_bound(max x, B)` when `None`).
pub fn pi_counts_with(xs: &[f64], b: f64, bound: Option<u64>, limit: u128) -> Result<PiCounts> {
    if xs.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidArgument("thresholds must be finite and ≥ 0".into()));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("B must be positive, got {b}")));
    }
    let x_max = xs.iter().copied().fold(0.0, f64::max);
    if x_max < 1.0 {
        return Ok(PiCounts {
            b,
            x_grid: xs.to_vec(),
            counts: vec![0; xs.len()],
            entry_bound: 0,
            ties: Vec::new(),
        });
    }
    let bound = match bound {
        Some(n) => n,
        None => entry_bound(x_max, b)?,
    };
    check_budget(bound, limit)?;
    let found = heights_in_box(bound, b, x_max * (1.0 + TIE_TOLERANCE));
    let mut counts = Vec::with_capacity(xs.len());
    let mut ties = Vec::new();
    for &x in xs {
        let cap = x * (1.0 + TIE_TOLERANCE);
        counts.push(found.iter().filter(|(_, h)| *h <= cap).count() as u64);
        ties.extend(
            found
                .iter()
                .filter(|(_, h)| (h - x).abs() <= TIE_TOLERANCE * x)
                .map(|(g, h)| Tie {
                    x,
                    element: g.matrix(),
                    height: *h,
                }),
        );
    }
    Ok(PiCounts {
        b,
        x_grid: xs.to_vec(),
        counts,
        entry_bound: bound,
        ties,
    })
}

/// `π(x)` with the closed convention `h ≤ x`; ties are reported.
pub fn pi_count(x: f64, b: f64) -> Result<PiCounts> {
    pi_counts_with(&[x], b, None, DEFAULT_ENUMERATION_LIMIT)
}

/// `π(x)` at the entry bounds `N` and `N + 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaturationCheck {
    pub x: f64,
    pub bound: u64,
    pub count: u64,
    pub count_wider: u64,
}

impl SaturationCheck {
    pub fn agrees(&self) -> bool {
        self.count == self.count_wider
    }
}

pub fn saturation_check(x: f64, b: f64) -> Result<SaturationCheck> {
    let bound = entry_bound(x, b)?;
    let narrow = pi_counts_with(&[x], b, Some(bound), DEFAULT_ENUMERATION_LIMIT)?;
    let wide = pi_counts_with(&[x], b, Some(bound + 2), DEFAULT_ENUMERATION_LIMIT)?;
    Ok(SaturationCheck {
        x,
        bound,
        count: narrow.counts[0],
        count_wider: wide.counts[0],
    })
}

/// Agreement of `h_fin` from elementary divisors with `Π p^{k_p}` where `k_p`
/// is the breadth-first distance of the vertex `M·[Z_p²]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildingCheck {
    pub bound: u64,
    pub primes: Vec<u64>,
    /// Elements with `|det| > 1` supported on `primes`.
    pub checked: u64,
    pub mismatches: Vec<[[i64; 2]; 2]>,
}

/// Runs the comparison for every canonical element with entries in `[−N, N]`
/// whose determinant is supported on `primes`.
pub fn building_check(bound: u64, primes: &[u64]) -> Result<BuildingCheck> {
    let candidates: Vec<(GroupElementQ, Vec<(u64, u32)>)> = enumerate_elements(bound)?
        .filter_map(|g| {
            let det = g.det().unsigned_abs();
            if det == 1 {
                return None;
            }
            let f = factorize(det).ok()?;
            f.iter().all(|(p, _)| primes.contains(p)).then_some((g, f))
        })
        .collect();
    let mut depth: BTreeMap<u64, u32> = BTreeMap::new();
    for (_, f) in &candidates {
        for &(p, k) in f {
            let e = depth.entry(p).or_insert(0);
            *e = (*e).max(k);
        }
    }
    let mut distances: BTreeMap<u64, BTreeMap<Vec<Vec<i64>>, u32>> = BTreeMap::new();
    for (&p, &k) in &depth {
        let classes = enumerate_classes(BuildingParams::new(2, p)?, k)?;
        distances.insert(
            p,
            classes.into_iter().map(|c| (c.class.hnf().to_vec(), c.distance)).collect(),
        );
    }
    let mut mismatches = Vec::new();
    for (g, f) in &candidates {
        let rows = g.rows();
        let mut via_bfs = 1u64;
        let mut via_snf = 1u64;
        for &(p, _) in f {
            let class = LatticeClass::of_matrix(&rows, p)?;
            let k = *distances[&p]
                .get(class.hnf())
                .ok_or_else(|| Error::Domain(format!("vertex of {rows:?} not reached at p = {p}")))?;
            via_bfs *= p.pow(k);
            via_snf *= p.pow(building_distance(&rows, p)?);
        }
        if via_bfs != via_snf || via_snf != g.det().unsigned_abs() {
            mismatches.push(g.matrix());
        }
    }
    Ok(BuildingCheck {
        bound,
        primes: primes.to_vec(),
        checked: candidates.len() as u64,
        mismatches,
    })
}

/// `∫_0^∞ e^{−2t} b^∞(t) dt` for `d = 2` with norm parameter `b`, or `None`
/// when the integral diverges (`b ≥ 1`).
///
/// Composite Gauss-Legendre on unit intervals up to a cut where the integrand
/// has decayed by `e^{−40}`; beyond it `b^∞(t) ≈ b^∞(t_c)e^{2b(t−t_c)}`.
pub fn exponential_moment(b: f64) -> Result<Option<f64>> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("B must be positive, got {b}")));
    }
    if b >= 1.0 {
        return Ok(None);
    }
    let rate = 2.0 - 2.0 * b;
    let t_cut = (40.0 / rate).min(600.0 / (2.0 * b)).max(1.0).ceil();
    let (nodes, weights) = gauss_legendre(16);
    let pieces = (0..t_cut as usize)
        .into_par_iter()
        .map(|k| {
            let mut s = 0.0;
            for (x, w) in nodes.iter().zip(&weights) {
                let t = k as f64 + x;
                s += w * (-2.0 * t).exp() * ball_volume_numeric(2, b, t, 4)?;
            }
            Ok(s)
        })
        .collect::<Result<Vec<f64>>>()?;
    let tail = (-2.0 * t_cut).exp() * ball_volume_numeric(2, b, t_cut, 4)? / rate;
    Ok(Some(pieces.iter().sum::<f64>() + tail))
}

/// Exact counts against the asymptotic prediction and the ball-volume sandwich.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub b: f64,
    pub covolume: f64,
    pub x_grid: Vec<f64>,
    pub pi_values: Vec<u64>,
    /// `π(x)/x²`.
    pub ratio: Vec<f64>,
    /// `30/π²·∫e^{−2t}b^∞(t)dt·x²/covolume` with `b^∞` at parameter `B`.
    pub predicted_conv_a: Vec<Option<f64>>,
    /// The same with `b^∞` at parameter `B/2`, whose growth is `e^{Bt}`.
    pub predicted_conv_b: Vec<Option<f64>>,
    /// `b(log x − ε)/covolume`.
    pub lower_sandwich: Vec<f64>,
    /// `b(log x + ε)/covolume`.
    pub upper_sandwich: Vec<f64>,
    pub sandwich_eps: f64,
    pub entry_bound_used: u64,
    pub ties: Vec<Tie>,
}

fn adelic_or_zero(b: f64, t: f64) -> Result<f64> {
    if t <= 0.0 {
        Ok(0.0)
    } else {
        adelic_ball_volume(2, b, t)
    }
}

/// Tabulates `π(x)` over `x_grid` for `0 < B < 2`.
pub fn compare_report(x_grid: &[f64], b: f64, covolume: f64) -> Result<CountReport> {
    compare_report_with(x_grid, b, covolume, DEFAULT_ENUMERATION_LIMIT)
}

/// [`compare_report`] with an explicit enumeration budget.
pub fn compare_report_with(x_grid: &[f64], b: f64, covolume: f64, limit: u128) -> Result<CountReport> {
    if !(b > 0.0 && b < 2.0) {
        return Err(Error::Domain(format!("the comparison needs 0 < B < 2, got {b}")));
    }
    if !(covolume > 0.0) || !covolume.is_finite() {
        return Err(Error::InvalidArgument(format!("covolume must be positive, got {covolume}")));
    }
    if x_grid.is_empty() || x_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("x grid must be nonempty and increasing".into()));
    }
    let counts = pi_counts_with(x_grid, b, None, limit)?;
    let scale = 30.0 / (PI * PI) / covolume;
    let conv_a = exponential_moment(b)?;
    let conv_b = exponential_moment(b / 2.0)?;
    let mut lower = Vec::with_capacity(x_grid.len());
    let mut upper = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let t = x.max(f64::MIN_POSITIVE).ln();
        lower.push(adelic_or_zero(b, t - SANDWICH_EPS)? / covolume);
        upper.push(adelic_or_zero(b, t + SANDWICH_EPS)? / covolume);
    }
    Ok(CountReport {
        b,
        covolume,
        x_grid: x_grid.to_vec(),
        ratio: x_grid.iter().zip(&counts.counts).map(|(x, &c)| c as f64 / (x * x)).collect(),
        predicted_conv_a: x_grid.iter().map(|x| conv_a.map(|i| scale * i * x * x)).collect(),
        predicted_conv_b: x_grid.iter().map(|x| conv_b.map(|i| scale * i * x * x)).collect(),
        pi_values: counts.counts,
        lower_sandwich: lower,
        upper_sandwich: upper,
        sandwich_eps: SANDWICH_EPS,
        entry_bound_used: counts.entry_bound,
        ties: counts.ties,
    })
}
