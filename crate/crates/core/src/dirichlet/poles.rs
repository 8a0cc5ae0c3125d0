use num_traits::ToPrimitive;
use serde::Serialize;

use super::EulerFactorParams;
use crate::arith::primes_up_to;
use crate::{Error, Result};

/// The abscissas `s_p = log c(p) / log p` of the poles of the Euler factors.
#[derive(Debug, Clone, Serialize)]
pub struct PoleTable {
    pub d: usize,
    /// `(p, s_p)` for `p ≤ p_max`, in decreasing order of `s_p`.
    pub entries: Vec<(u64, f64)>,
    /// `B_0 = s_2 = log(d 2^{d-1} - 2) / log 2`, the largest abscissa.
    pub b0: f64,
    /// Number of listed primes with `s_p > d`.
    pub count_above_d: usize,
}

fn abscissa(d: usize, p: u64) -> Result<f64> {
    let c = EulerFactorParams::new(d, p)?.c_p().to_f64().unwrap_or(f64::INFINITY);
    Ok(c.ln() / (p as f64).ln())
}

pub fn pole_abscissas(d: usize, p_max: u64) -> Result<PoleTable> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    let mut entries = primes_up_to(p_max.max(2))
        .into_iter()
        .map(|p| Ok((p, abscissa(d, p)?)))
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let b0 = abscissa(d, 2)?;
    let count_above_d = entries.iter().filter(|e| e.1 > d as f64).count();
    Ok(PoleTable {
        d,
        entries,
        b0,
        count_above_d,
    })
}

/// One row `(n, s_2, s_3)` of the table of leading abscissas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleRow {
    pub n: usize,
    pub s_2: f64,
    pub s_3: f64,
}

/// `s_2` and `s_3` for `n = 2..=n_max`.
pub fn poles_table(n_max: usize) -> Result<Vec<PoleRow>> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 2, got {n_max}")));
    }
    (2..=n_max)
        .map(|n| {
            Ok(PoleRow {
                n,
                s_2: abscissa(n, 2)?,
                s_3: abscissa(n, 3)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRINTED: [(usize, f64, f64); 5] = [
        (2, 1.0, 1.0),
        (3, 3.3219280949, 2.7712437492),
        (4, 4.9068905956, 4.1257498573),
        (5, 6.2854022189, 5.3653166773),
        (6, 7.5698556083, 6.5507064185),
    ];

    #[test]
    fn printed_table() {
        let rows = poles_table(6).unwrap();
        assert_eq!(rows.len(), 5);
        for (row, &(n, s2, s3)) in rows.iter().zip(PRINTED.iter()) {
            assert_eq!(row.n, n);
            assert!((row.s_2 - s2).abs() < 1e-9, "n={n}");
            assert!((row.s_3 - s3).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn b0_closed_form() {
        for d in 3..=10usize {
            let t = pole_abscissas(d, 2).unwrap();
            let expected = ((d as f64) * 2f64.powi(d as i32 - 1) - 2.0).ln() / 2f64.ln();
            assert!((t.b0 - expected).abs() < 1e-12);
            assert_eq!(t.entries[0], (2, t.b0));
        }
    }

    #[test]
    fn abscissas_decrease_towards_d_minus_one() {
        for d in 3..=6usize {
            let t = pole_abscissas(d, 10_000).unwrap();
            let mut by_prime = t.entries.clone();
            by_prime.sort_by_key(|e| e.0);
            assert_eq!(by_prime.len(), 1229);
            for w in by_prime.windows(2) {
                assert!(w[0].1 > w[1].1, "d={d} p={}", w[0].0);
                assert!(w[1].1 > (d - 1) as f64);
            }
            // entries are reported in decreasing order of s_p, i.e. by prime
            assert!(t.entries.iter().zip(&by_prime).all(|(a, b)| a == b));
            let above = by_prime.iter().filter(|e| e.1 > d as f64).count();
            assert_eq!(t.count_above_d, above);
            assert!(above >= 1);
        }
        // d = 3: s_2 and s_3 exceed 3, s_5 = log 55 / log 5 < 3
        assert_eq!(pole_abscissas(3, 100).unwrap().count_above_d, 1 + (abscissa(3, 3).unwrap() > 3.0) as usize);
    }

    #[test]
    fn d2_abscissa_is_one() {
        let t = pole_abscissas(2, 1000).unwrap();
        assert!(t.entries.iter().all(|e| (e.1 - 1.0).abs() < 1e-15));
        assert_eq!(t.count_above_d, 0);
    }
}
