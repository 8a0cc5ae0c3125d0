use num_complex::Complex64;

/// `"re,im"` or `"re"`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("not a real number: {t:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected \"re,im\", got {s:?}")),
    }
}

/// `"p"` or `"p/q"` with `q ≠ 0`.
fn rational(s: &str) -> Result<(i64, i64), String> {
    let int = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("not an integer: {t:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let q = int(q)?;
            if q == 0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok((int(p)?, q))
        }
        None => Ok((int(s)?, 1)),
    }
}

/// Rows separated by `;`, entries by `,`; entries are integers or fractions.
pub fn rational_matrix(s: &str) -> Result<Vec<Vec<(i64, i64)>>, String> {
    let rows = s
        .split(';')
        .map(|row| row.split(',').map(rational).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let n = rows.len();
    if n < 2 || rows.iter().any(|r| r.len() != n) {
        return Err(format!("expected a square matrix of size at least 2, got {s:?}"));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("2.5,1").unwrap(), Complex64::new(2.5, 1.0));
        assert_eq!(complex(" 3 ").unwrap(), Complex64::new(3.0, 0.0));
        assert!(complex("1,2,3").is_err());
        assert!(complex("x").is_err());
    }

    #[test]
    fn matrices() {
        assert_eq!(rational_matrix("1,0;0,1").unwrap(), vec![vec![(1, 1), (0, 1)], vec![(0, 1), (1, 1)]]);
        assert_eq!(rational_matrix("1/2, 3; -1, 2/3").unwrap()[0][0], (1, 2));
        assert!(rational_matrix("1,0").is_err());
        assert!(rational_matrix("1,0;0").is_err());
        assert!(rational_matrix("1/0,0;0,1").is_err());
    }
}
