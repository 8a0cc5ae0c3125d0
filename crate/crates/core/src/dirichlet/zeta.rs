use num_complex::Complex64;

use crate::{Error, Result};

/// Smallest admissible distance of `Re(s)` from the pole at `s = 1`.
pub const ZETA_MARGIN: f64 = 1e-6;

/// `B_{2k} / (2k)!` for `k = 1..=8`.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

fn cutoff(s: Complex64) -> usize {
    s.norm().ceil().max(20.0) as usize
}

/// `ζ(s) - 1` by Euler-Maclaurin summation, accurate in absolute terms even
/// when `ζ(s)` is very close to 1.
pub(crate) fn zeta_minus_one(s: Complex64) -> Result<Complex64> {
    if !(s.re > 1.0 + ZETA_MARGIN) || !s.im.is_finite() {
        return Err(Error::Domain(format!(
            "zeta needs Re(s) > 1 + {ZETA_MARGIN:e}, got s = {s}"
        )));
    }
    let n = cutoff(s);
    let mut head = Complex64::new(0.0, 0.0);
    // smallest terms first
    for k in (2..n).rev() {
        head += (-s * (k as f64).ln()).exp();
    }
    let big_n = n as f64;
    let ln_n = big_n.ln();
    let n_pow = (-s * ln_n).exp();
    let mut tail = n_pow * big_n / (s - 1.0) + n_pow * 0.5;

    // rising factorial s (s+1) … (s+2k-2) times N^{-s-2k+1}
    let mut rising = s;
    let mut power = n_pow / big_n;
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if k > 0 {
            rising *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
            power /= big_n * big_n;
        }
        tail += rising * power * *coeff;
    }
    Ok(head + tail)
}

/// Riemann zeta function for `Re(s) > 1`.
///
/// The Euler-Maclaurin remainder after eight Bernoulli terms with
/// `N = max(20, |s|)` stays below `10^{-13}` on `Re(s) ≥ 1.5`.
pub fn zeta_em(s: Complex64) -> Result<Complex64> {
    Ok(zeta_minus_one(s)? + 1.0)
}

/// Real-argument convenience wrapper around [`zeta_em`].
pub fn zeta(s: f64) -> Result<f64> {
    Ok(zeta_em(Complex64::new(s, 0.0))?.re)
}

/// `ln(1 + w)` without cancellation for small `|w|`.
pub(crate) fn ln_1p(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        let mut term = w;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=8 {
            acc += term / k as f64;
            term *= -w;
        }
        acc
    } else {
        (w + 1.0).ln()
    }
}
