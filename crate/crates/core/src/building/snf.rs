use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ElemDivisorType;
use crate::arith::{require_prime, valuation};
use crate::{Error, Result};

fn to_big<T: Clone + Into<BigInt>>(m: &[Vec<T>]) -> Result<Vec<Vec<BigInt>>> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument("expected a nonempty square matrix".into()));
    }
    Ok(m.iter()
        .map(|row| row.iter().cloned().map(Into::into).collect())
        .collect())
}

/// Diagonal of the Smith normal form `s_1 | s_2 | … | s_n`, all positive.
pub fn smith_normal_form<T: Clone + Into<BigInt>>(m: &[Vec<T>]) -> Result<Vec<BigInt>> {
    let mut a = to_big(m)?;
    let n = a.len();
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Err(Error::SingularMatrix);
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }

            let mut clean = true;
            for i in t + 1..n {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..n {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..n {
                    let v = &q * &a[i][t];
                    a[i][j] -= v;
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold any offending row into row t and repeat
            let offender = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            match offender {
                Some((i, _)) => {
                    for j in t..n {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
    }
    Ok((0..n).map(|i| a[i][i].abs()).collect())
}

/// p-adic valuations of the elementary divisors of a nonsingular integer matrix.
pub fn snf_exponents<T: Clone + Into<BigInt>>(m: &[Vec<T>], p: u64) -> Result<ElemDivisorType> {
    require_prime(p)?;
    let diag = smith_normal_form(m)?;
    Ok(ElemDivisorType::new(
        diag.iter().map(|s| valuation(s, p)).collect(),
    ))
}

/// Graph distance between the vertex `M·[Z_p^d]` and the standard vertex.
pub fn building_distance<T: Clone + Into<BigInt>>(m: &[Vec<T>], p: u64) -> Result<u32> {
    Ok(snf_exponents(m, p)?.distance())
}

pub(crate) fn big_det(m: &[Vec<BigInt>]) -> BigInt {
    // fraction-free Bareiss elimination
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ident(n: usize) -> Vec<Vec<i64>> {
        (0..n)
            .map(|i| (0..n).map(|j| (i == j) as i64).collect())
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(snf_exponents(&ident(4), 5).unwrap().exponents(), &[0, 0, 0, 0]);
        assert_eq!(
            snf_exponents(&[vec![2i64, 0], vec![0, 8]], 2).unwrap().exponents(),
            &[1, 3]
        );
        assert_eq!(
            snf_exponents(&[vec![1i64, 1], vec![-1, 1]], 2).unwrap().exponents(),
            &[0, 1]
        );
        assert_eq!(building_distance(&ident(3), 7).unwrap(), 0);
        assert_eq!(building_distance(&[vec![1i64, 0], vec![0, 2]], 2).unwrap(), 1);
        assert_eq!(building_distance(&[vec![2i64, 0], vec![0, 8]], 2).unwrap(), 2);
    }

    #[test]
    fn snf_diagonal_divides() {
        let m = vec![vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn singular_rejected() {
        assert_eq!(
            snf_exponents(&[vec![1i64, 2], vec![2, 4]], 3),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn coprime_determinant_gives_zero_distance() {
        let m = vec![vec![3i64, 1], vec![1, 2]]; // det 5
        assert_eq!(building_distance(&m, 2).unwrap(), 0);
        assert_eq!(building_distance(&m, 5).unwrap(), 1);
    }

    fn unimodular(ops: &[(usize, usize, i64)], n: usize) -> Vec<Vec<i64>> {
        let mut u = ident(n);
        for &(i, j, c) in ops {
            if i == j {
                continue;
            }
            for k in 0..n {
                u[k][i] += c * u[k][j];
            }
        }
        u
    }

    fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    proptest! {
        #[test]
        fn distance_is_unimodular_invariant(
            entries in proptest::collection::vec(-12i64..=12, 9),
            ops in proptest::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..5),
            p in prop::sample::select(vec![2u64, 3, 5, 7]),
        ) {
            let m: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let det = big_det(&to_big(&m).unwrap());
            prop_assume!(!det.is_zero());
            let u = unimodular(&ops, 3);
            let mu = mat_mul(&m, &u);
            let um = mat_mul(&u, &m);
            let base = snf_exponents(&m, p).unwrap();
            prop_assert_eq!(&snf_exponents(&mu, p).unwrap(), &base);
            prop_assert_eq!(&snf_exponents(&um, p).unwrap(), &base);
            prop_assert_eq!(base.total(), valuation(&det, p));
        }
    }
}
