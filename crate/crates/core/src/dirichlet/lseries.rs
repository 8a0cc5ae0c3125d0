use num_complex::Complex64;
use serde::Serialize;

use super::zeta::{ln_1p, zeta_em, zeta_minus_one, ZETA_MARGIN};
use crate::arith::{moebius, primes_up_to};
use crate::{Error, Result};

/// Which Euler product to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "group", rename_all = "lowercase")]
pub enum SeriesKind {
    /// `Π (1 - [c(p) - D(p)] p^{-s}) / (1 - c(p) p^{-s})` for `PGL_d`.
    Pgl { d: usize },
    /// `Π (1 + p^{1-2s}) / (1 - p^{2-2s})`, the `SL_2` orbit series.
    Sl2,
}

/// Local factor `(1 - A(p) X) / (1 - C(p) X)` with `X = p^{-w s}`, where
/// `|A(p)|, |C(p)| ≤ K p^δ`.
struct LocalFactor {
    c: Vec<f64>,
    a: Vec<f64>,
    w: f64,
    k: f64,
    delta: f64,
}

impl SeriesKind {
    /// Abscissa of absolute convergence of the Euler product.
    pub fn abscissa(&self) -> f64 {
        match *self {
            SeriesKind::Pgl { d } => d as f64,
            SeriesKind::Sl2 => 1.5,
        }
    }

    fn local_factor(&self) -> LocalFactor {
        match *self {
            SeriesKind::Pgl { d } => {
                // c(p) = p + … + p^{d-2} + (d-1) p^{d-1}
                let mut c = vec![1.0; d];
                c[0] = 0.0;
                c[d - 1] = (d - 1) as f64;
                // c(p) - D(p) = -(d-1) - (d-2)(p + … + p^{d-2})
                let mut a = vec![-((d - 2) as f64); d - 1];
                a[0] = -((d - 1) as f64);
                LocalFactor {
                    c,
                    a,
                    w: 1.0,
                    k: 2.0 * (d - 1) as f64,
                    delta: (d - 1) as f64,
                }
            }
            SeriesKind::Sl2 => LocalFactor {
                c: vec![0.0, 0.0, 1.0],
                a: vec![0.0, -1.0],
                w: 2.0,
                k: 1.0,
                delta: 2.0,
            },
        }
    }
}

/// A value of `L(s)` from the Euler product over `p ≤ cutoff`.
#[derive(Debug, Clone, Serialize)]
pub struct LSeriesValue {
    pub kind: SeriesKind,
    #[serde(serialize_with = "crate::format::serialize_complex")]
    pub s: Complex64,
    /// Truncated product times the tail estimate `exp(correction)`.
    #[serde(serialize_with = "crate::format::serialize_complex")]
    pub value: Complex64,
    /// The bare product over `p ≤ cutoff`.
    #[serde(serialize_with = "crate::format::serialize_complex")]
    pub truncated: Complex64,
    /// Rigorous bound on `|log L(s) - log truncated|`.
    pub truncation_bound: f64,
    /// Estimate of `log L(s) - log truncated` from prime zeta tails.
    #[serde(serialize_with = "crate::format::serialize_complex")]
    pub correction: Complex64,
    /// Error bound on `correction` (in the logarithm).
    pub correction_error: f64,
    /// `false` when the tail was too large for the expansion and `value`
    /// equals `truncated`.
    pub tail_corrected: bool,
    pub cutoff: u64,
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// `Σ_{n > P} n^{-σ} ≤ P^{1-σ} / (σ - 1)`.
fn integer_tail(p_cut: f64, sigma: f64) -> f64 {
    (p_cut.ln() * (1.0 - sigma)).exp() / (sigma - 1.0)
}

/// Prime-restricted zeta tails `ζ_{>P}(z) = Π_{p > P} (1 - p^{-z})^{-1}`.
struct PrimeTail<'a> {
    primes: &'a [u64],
    p_cut: f64,
}

impl PrimeTail<'_> {
    /// `log ζ_{>P}(z)` with an absolute error bound. When the value is
    /// provably below the rounding noise of the computation, it is replaced by
    /// 0 and the error bound by the analytic bound.
    fn log_zeta(&self, z: Complex64) -> Result<(Complex64, f64)> {
        let sigma = z.re;
        // -log(1 - x) ≤ x / (1 - x) and x ≤ P^{-σ} ≤ 1/2
        let bound = 2.0 * integer_tail(self.p_cut, sigma);
        let floor_noise = f64::EPSILON * (-sigma * 2f64.ln()).exp();
        if bound <= floor_noise {
            return Ok((Complex64::new(0.0, 0.0), bound));
        }
        let zm1 = zeta_minus_one(z)?;
        let head = ln_1p(zm1);
        let mut acc = head;
        let mut magnitude = head.norm();
        for &p in self.primes.iter().rev() {
            let term = ln_1p(-(-z * (p as f64).ln()).exp());
            magnitude += term.norm();
            acc += term;
        }
        let noise = 8.0 * f64::EPSILON * (magnitude + (self.primes.len() as f64).sqrt() * acc.norm())
            + 1e-14 * zm1.norm();
        if bound <= noise {
            Ok((Complex64::new(0.0, 0.0), bound))
        } else {
            Ok((acc, noise))
        }
    }

    /// `P_{>P}(τ) = Σ_{p > P} p^{-τ} = Σ_n μ(n)/n · log ζ_{>P}(nτ)`.
    fn prime_zeta(&self, tau: Complex64) -> Result<(Complex64, f64)> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for n in 1..=64u64 {
            let z = tau * n as f64;
            let tail_bound = 2.0 * integer_tail(self.p_cut, z.re);
            if n > 1 && tail_bound < 1e-40 {
                // remaining terms are dominated by a geometric series in P^{-σ}
                err += 2.0 * tail_bound;
                break;
            }
            let mu = moebius(n);
            if mu == 0 {
                continue;
            }
            let (v, e) = self.log_zeta(z)?;
            acc += v * (mu as f64 / n as f64);
            err += e / n as f64;
        }
        Ok((acc, err))
    }
}

/// Euler product of `L` for `PGL_d` at `s`, `Re(s) > d`.
pub fn l_euler(d: usize, s: Complex64, prime_cutoff: u64) -> Result<LSeriesValue> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    l_euler_kind(SeriesKind::Pgl { d }, s, prime_cutoff)
}

/// Euler product of the `SL_2` orbit series at `s`, `Re(s) > 3/2`.
pub fn l_euler_sl2(s: Complex64, prime_cutoff: u64) -> Result<LSeriesValue> {
    l_euler_kind(SeriesKind::Sl2, s, prime_cutoff)
}

/// Truncated Euler product over `p ≤ prime_cutoff`, a rigorous bound on the
/// logarithm of the omitted factors, and a tail estimate from prime zeta
/// functions.
///
/// For `p > P` the local logarithm expands as
/// `Σ_k (C(p)^k - A(p)^k) X^k / k`; expanding `C^k - A^k = Σ_j e_{kj} p^j`
/// turns the tail into `Σ_k Σ_j e_{kj}/k · P_{>P}(kws - j)`.
pub fn l_euler_kind(kind: SeriesKind, s: Complex64, prime_cutoff: u64) -> Result<LSeriesValue> {
    let abscissa = kind.abscissa();
    if !(s.re > abscissa) || !s.im.is_finite() {
        return Err(Error::Domain(format!(
            "the Euler product needs Re(s) > {abscissa}, got s = {s}"
        )));
    }
    if prime_cutoff < 2 {
        return Err(Error::InvalidArgument(format!(
            "prime cutoff must be at least 2, got {prime_cutoff}"
        )));
    }
    let f = kind.local_factor();
    let primes = primes_up_to(prime_cutoff);

    let mut log_sum = Complex64::new(0.0, 0.0);
    for &p in primes.iter().rev() {
        let pf = p as f64;
        let x = (-s * (f.w * pf.ln())).exp();
        let cx = x * poly_eval(&f.c, pf);
        let ax = x * poly_eval(&f.a, pf);
        let denominator = (Complex64::new(1.0, 0.0) - cx).norm();
        if denominator < 1e-12 {
            return Err(Error::PoleProximity { p, modulus: denominator });
        }
        log_sum += ln_1p(-ax) - ln_1p(-cx);
    }
    let truncated = log_sum.exp();

    let p_cut = prime_cutoff as f64;
    let alpha = f.w * s.re - f.delta;
    let u_p = f.k * (p_cut.ln() * (f.delta - f.w * s.re)).exp();
    let truncation_bound = if u_p < 1.0 && alpha > 1.0 {
        2.0 * f.k / (1.0 - u_p) * integer_tail(p_cut, alpha)
    } else {
        f64::INFINITY
    };

    let zero = Complex64::new(0.0, 0.0);
    let (correction, correction_error, tail_corrected) = if u_p < 0.5 && alpha > 1.0 {
        let tail = PrimeTail { primes: &primes, p_cut };
        let (corr, err) = tail_correction(&f, s, &tail, u_p, alpha)?;
        (corr, err, true)
    } else {
        (zero, truncation_bound, false)
    };

    Ok(LSeriesValue {
        kind,
        s,
        value: (log_sum + correction).exp(),
        truncated,
        truncation_bound,
        correction,
        correction_error,
        tail_corrected,
        cutoff: prime_cutoff,
    })
}

fn tail_correction(
    f: &LocalFactor,
    s: Complex64,
    tail: &PrimeTail,
    u_p: f64,
    alpha: f64,
) -> Result<(Complex64, f64)> {
    let mut corr = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut c_pow = vec![1.0];
    let mut a_pow = vec![1.0];
    for k in 1..=60usize {
        c_pow = poly_mul(&c_pow, &f.c);
        a_pow = poly_mul(&a_pow, &f.a);
        for j in 0..c_pow.len() {
            let e = c_pow[j] - a_pow.get(j).copied().unwrap_or(0.0);
            if e == 0.0 {
                continue;
            }
            let tau = s * (k as f64 * f.w) - j as f64;
            let (v, verr) = tail.prime_zeta(tau)?;
            corr += v * (e / k as f64);
            err += verr * e.abs() / k as f64;
        }
        // bound on the omitted orders k' > k
        let next = (k + 1) as f64;
        let rest = 2.0 * f.k.powf(next) / (1.0 - u_p) * integer_tail(tail.p_cut, next * alpha)
            / next;
        if rest < 1e-18 {
            err += rest;
            return Ok((corr, err));
        }
    }
    Err(Error::Domain("prime tail expansion did not converge".into()))
}

/// `ζ(s) ζ(s-1) / ζ(2s)`, valid for `Re(s) > 2`.
pub fn l_closed_pgl2(s: Complex64) -> Result<Complex64> {
    if !(s.re > 2.0 + ZETA_MARGIN) {
        return Err(Error::Domain(format!(
            "the closed form has a pole at s = 2 and needs Re(s) > 2, got s = {s}"
        )));
    }
    Ok(zeta_em(s)? * zeta_em(s - 1.0)? / zeta_em(s * 2.0)?)
}

/// `ζ(2s-2) ζ(2s-1) / ζ(4s-2)`, valid for `Re(s) > 3/2`.
pub fn l_closed_sl2(s: Complex64) -> Result<Complex64> {
    if !(s.re > 1.5 + ZETA_MARGIN) {
        return Err(Error::Domain(format!(
            "the closed form has a pole at s = 3/2 and needs Re(s) > 3/2, got s = {s}"
        )));
    }
    Ok(zeta_em(s * 2.0 - 2.0)? * zeta_em(s * 2.0 - 1.0)? / zeta_em(s * 4.0 - 2.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::coeff_sieve;
    use num_traits::ToPrimitive;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn pgl2_matches_closed_form() {
        for s in [2.5, 3.0, 4.0] {
            let v = l_euler(2, re(s), 100_000).unwrap();
            let closed = l_closed_pgl2(re(s)).unwrap();
            let rel = (v.value - closed).norm() / closed.norm();
            assert!(rel < 1e-8, "s={s} rel={rel}");
            assert!(v.tail_corrected);
            let raw_gap = (v.truncated - closed).norm() / closed.norm();
            assert!(raw_gap <= v.truncation_bound.exp_m1(), "s={s}");
            assert!((v.value - closed).norm() <= v.truncation_bound);
            assert!(v.correction_error < 1e-10, "s={s} err={}", v.correction_error);
        }
        let v = l_euler(2, re(3.0), 100_000).unwrap();
        assert!((v.value.re - 1.9436).abs() < 1e-4);
    }

    #[test]
    fn sl2_matches_closed_form() {
        for s in [2.0, 2.5] {
            let v = l_euler_sl2(re(s), 100_000).unwrap();
            let closed = l_closed_sl2(re(s)).unwrap();
            let rel = (v.value - closed).norm() / closed.norm();
            assert!(rel < 1e-8, "s={s} rel={rel}");
        }
    }

    #[test]
    fn complex_argument() {
        let s = Complex64::new(3.0, 2.0);
        let v = l_euler(2, s, 10_000).unwrap();
        let closed = l_closed_pgl2(s).unwrap();
        assert!((v.value - closed).norm() / closed.norm() < 1e-8);
    }

    #[test]
    fn cutoff_refinement_stays_within_bound() {
        let coarse = l_euler(3, re(4.0), 10_000).unwrap();
        let fine = l_euler(3, re(4.0), 100_000).unwrap();
        let gap = (coarse.truncated.ln() - fine.truncated.ln()).norm();
        assert!(gap <= coarse.truncation_bound, "{gap} vs {}", coarse.truncation_bound);
        let corrected_gap = (coarse.value - fine.value).norm() / fine.value.norm();
        assert!(corrected_gap < 1e-9, "{corrected_gap}");
    }

    #[test]
    fn euler_product_matches_coefficient_sum() {
        // d = 3 at s = 6: the Dirichlet series converges fast enough to sum directly
        let table = coeff_sieve(3, 200_000).unwrap();
        let direct: f64 = (1..=200_000u64)
            .rev()
            .map(|m| table.get(m).unwrap().to_f64().unwrap() * (m as f64).powf(-6.0))
            .sum();
        let v = l_euler(3, re(6.0), 100_000).unwrap();
        assert!((v.value.re / direct - 1.0).abs() < 1e-6);
    }

    #[test]
    fn tends_to_one() {
        let v = l_euler(2, re(60.0), 1000).unwrap();
        assert!((v.value - 1.0).norm() < 1e-15);
        assert!((l_closed_pgl2(re(60.0)).unwrap().re - 1.0).abs() < 1e-15);
        assert!((l_closed_sl2(re(40.0)).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_examples() {
        // ζ(4) ζ(3) / ζ(8) = 1.2957309578…
        assert!((l_closed_pgl2(re(4.0)).unwrap().re - 1.295_730_957_880_51).abs() < 1e-12);
        let a = l_closed_sl2(re(2.0)).unwrap();
        let b = l_closed_pgl2(re(3.0)).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(l_euler(3, re(3.0), 100).is_err());
        assert!(l_euler(2, re(2.5), 1).is_err());
        assert!(l_euler_sl2(re(1.5), 100).is_err());
        assert!(l_closed_pgl2(re(2.0)).is_err());
        assert!(l_closed_sl2(re(1.4)).is_err());
    }

    #[test]
    fn slowly_converging_region_reports_uncorrected_value() {
        let v = l_euler(4, re(4.05), 7).unwrap();
        assert!(!v.tail_corrected);
        assert_eq!(v.value, v.truncated);
    }
}
