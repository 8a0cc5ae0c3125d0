use num_traits::ToPrimitive;
use serde::Serialize;

use crate::dirichlet::{coeff_sieve_with, CoeffTable, DEFAULT_SIEVE_LIMIT};
use crate::samples::CumulativeSamples;
use crate::{Error, Result};

/// Point masses `μ` against a cumulative measure `ν` with asymptotic
/// `ν([0,T]) ~ T^α e^{βT}`.
#[derive(Debug, Clone, Serialize)]
pub struct MeasurePair {
    /// `(location, mass)`, sorted by location.
    masses: Vec<(f64, f64)>,
    #[serde(skip)]
    nu: CumulativeSamples,
    alpha: f64,
    beta: f64,
    /// `Σ mass·e^{−β·location}` over the listed masses.
    c: f64,
    /// Upper bound on `Σ mass·e^{−β·location}` over masses not listed.
    c_tail_bound: f64,
}

impl MeasurePair {
    pub fn new(mut masses: Vec<(f64, f64)>, nu: CumulativeSamples, alpha: f64, beta: f64) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidArgument("μ needs at least one point mass".into()));
        }
        if masses.iter().any(|&(t, w)| !(t >= 0.0) || !t.is_finite() || !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "point masses need finite locations ≥ 0 and finite positive masses".into(),
            ));
        }
        if !(alpha >= 0.0) || !(beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need α ≥ 0 and β > 0, got α={alpha}, β={beta}"
            )));
        }
        if nu.t0() != 0.0 {
            return Err(Error::InvalidArgument("ν must be sampled from 0".into()));
        }
        masses.sort_by(|a, b| a.0.total_cmp(&b.0));
        let c: f64 = masses.iter().map(|&(t, w)| w * (-beta * t).exp()).sum();
        if !c.is_finite() {
            return Err(Error::Domain("Σ mass·e^{-β·location} is not finite".into()));
        }
        Ok(Self {
            masses,
            nu,
            alpha,
            beta,
            c,
            c_tail_bound: 0.0,
        })
    }

    /// Records a bound on the constant contributed by masses beyond the list.
    pub fn with_tail_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound >= 0.0) {
            return Err(Error::InvalidArgument(format!("tail bound must be ≥ 0, got {bound}")));
        }
        self.c_tail_bound = bound;
        Ok(self)
    }

    pub fn masses(&self) -> &[(f64, f64)] {
        &self.masses
    }

    pub fn nu(&self) -> &CumulativeSamples {
        &self.nu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn c_tail_bound(&self) -> f64 {
        self.c_tail_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PersistencePoint {
    pub t: f64,
    /// `Σ_{t_i ≤ T} mass_i·ν([0, T − t_i])`.
    pub d_t: f64,
    /// `C·T^α·e^{βT}`.
    pub predicted: f64,
    pub ratio: f64,
    /// `d(T) / ((C + tail)·T^α·e^{βT})`, the ratio against the largest
    /// constant compatible with the tail bound.
    pub ratio_lower: f64,
}

/// `d(T)` and its ratio to `C·T^α·e^{βT}`.
pub fn persistence_check(pair: &MeasurePair, t: f64) -> Result<PersistencePoint> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t}")));
    }
    if t > pair.nu.t_end() + 1e-9 * pair.nu.step() {
        return Err(Error::InsufficientRange {
            available: pair.nu.t_end(),
            required: t,
        });
    }
    let mut d_t = 0.0;
    for &(loc, mass) in &pair.masses {
        if loc > t {
            break;
        }
        d_t += mass * pair.nu.interpolate((t - loc).max(0.0))?;
    }
    let growth = t.powf(pair.alpha) * (pair.beta * t).exp();
    let predicted = pair.c * growth;
    Ok(PersistencePoint {
        t,
        d_t,
        predicted,
        ratio: d_t / predicted,
        ratio_lower: d_t / ((pair.c + pair.c_tail_bound) * growth),
    })
}

/// `Σ_{m > M} (1 + log m) m^{-(s+1)} ≤ M^{-s}((1 + log M)/s + 1/s²)`, valid as a
/// bound on `Σ_{m>M} D(m) m^{-(s+2)}` for `d = 2` because `D(m)/m ≤ 1 + log m`.
fn pgl2_tail_bound(m_max: u64, s: f64) -> f64 {
    let m = m_max as f64;
    m.powf(-s) * ((1.0 + m.ln()) / s + 1.0 / (s * s))
}

/// Masses `D(m)/m^B` at `log m` for `m ≤ e^{T_max}` (`d = 2`) against
/// `ν([0,T]) = e^{2T}` sampled with `step` on `[0, T_max]`; `α = 0`, `β = 2`.
pub fn pgl2_measure_pair(b: f64, t_max: f64, step: f64) -> Result<MeasurePair> {
    pgl2_measure_pair_with(b, t_max, step, DEFAULT_SIEVE_LIMIT)
}

/// [`pgl2_measure_pair`] with an explicit sieve budget.
pub fn pgl2_measure_pair_with(b: f64, t_max: f64, step: f64, sieve_limit: u64) -> Result<MeasurePair> {
    if !(b >= 1.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("B must be ≥ 1, got {b}")));
    }
    if !(t_max > 0.0) || !t_max.is_finite() || !(step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need T_max > 0 and step > 0, got T_max={t_max}, step={step}"
        )));
    }
    let m_max = (t_max.exp() * (1.0 + 1e-12)).floor() as u64;
    let coeffs: CoeffTable = coeff_sieve_with(2, m_max, sieve_limit)?;
    let masses: Vec<(f64, f64)> = (1..=m_max)
        .map(|m| {
            let dm = coeffs.get(m).and_then(|v| v.to_f64()).unwrap_or(f64::INFINITY);
            ((m as f64).ln(), dm * (m as f64).powf(-b))
        })
        .collect();
    let n = (t_max / step - 1e-9).ceil() as usize + 1;
    let nu = CumulativeSamples::from_fn(0.0, step, n, |t| (2.0 * t).exp())?;
    MeasurePair::new(masses, nu, 0.0, 2.0)?.with_tail_bound(pgl2_tail_bound(m_max, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::{l_closed_pgl2, partial_sum};
    use num_complex::Complex64;

    fn exp_nu(beta: f64, t_max: f64, step: f64) -> CumulativeSamples {
        let n = (t_max / step).round() as usize + 1;
        CumulativeSamples::from_fn(0.0, step, n, |t| (beta * t).exp()).unwrap()
    }

    #[test]
    fn single_mass_at_origin() {
        let pair = MeasurePair::new(vec![(0.0, 1.0)], exp_nu(1.5, 10.0, 1e-3), 0.0, 1.5).unwrap();
        assert_eq!(pair.c(), 1.0);
        for &t in &[0.5, 3.0, 10.0] {
            let p = persistence_check(&pair, t).unwrap();
            assert!((p.ratio - 1.0).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn two_masses() {
        let pair = MeasurePair::new(vec![(2f64.ln(), 1.0), (0.0, 1.0)], exp_nu(2.0, 12.0, 1e-3), 0.0, 2.0).unwrap();
        assert!((pair.c() - 1.25).abs() < 1e-15);
        let p = persistence_check(&pair, 12.0).unwrap();
        assert!((p.ratio - 1.0).abs() < 1e-6);
        let early = persistence_check(&pair, 0.5).unwrap();
        assert!((early.ratio - 0.8).abs() < 1e-6);
    }

    #[test]
    fn pgl2_pair_at_twelve() {
        let pair = pgl2_measure_pair(1.0, 12.0, 1e-3).unwrap();
        let p = persistence_check(&pair, 12.0).unwrap();
        assert!((p.ratio - 1.0).abs() < 0.03);
        assert!((p.ratio_lower - 1.0).abs() < 0.03);
        let c_partial = partial_sum(2, 3.0, 12f64.exp().floor() as u64).unwrap();
        assert!((pair.c() - c_partial).abs() < 1e-12 * c_partial);
        let c_true = l_closed_pgl2(Complex64::new(3.0, 0.0)).unwrap().re;
        assert!(c_true >= pair.c() && c_true <= pair.c() + pair.c_tail_bound());
        for i in 0..=12 {
            let t = 6.0 + 0.5 * i as f64;
            let p = persistence_check(&pair, t).unwrap();
            assert!(p.ratio > 0.5 && p.ratio < 2.0, "t={t}: {}", p.ratio);
        }
    }

    #[test]
    fn errors() {
        let nu = exp_nu(1.0, 5.0, 0.01);
        assert!(MeasurePair::new(vec![], nu.clone(), 0.0, 1.0).is_err());
        assert!(MeasurePair::new(vec![(-1.0, 1.0)], nu.clone(), 0.0, 1.0).is_err());
        assert!(MeasurePair::new(vec![(1.0, 0.0)], nu.clone(), 0.0, 1.0).is_err());
        assert!(MeasurePair::new(vec![(1.0, 1.0)], nu.clone(), 0.0, 0.0).is_err());
        let pair = MeasurePair::new(vec![(0.0, 1.0)], nu, 0.0, 1.0).unwrap();
        assert!(matches!(persistence_check(&pair, 6.0), Err(Error::InsufficientRange { .. })));
        assert!(persistence_check(&pair, 0.0).is_err());
    }
}
