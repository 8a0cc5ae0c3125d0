//! Number formatting shared by the CSV and JSON emitters.

use std::fmt::Display;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

/// Significant digits used for every printed real number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits in the style of
/// C's `%.12g`: fixed notation for moderate exponents, scientific otherwise,
/// trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    fmt_sig(x, SIGNIFICANT_DIGITS)
}

/// `%.{digits}g`-style formatting.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Fixed-point formatting with a given number of decimals.
pub fn fmt_fixed(x: f64, decimals: usize) -> String {
    format!("{:.*}", decimals, x)
}

/// Serde helper: a complex number as `[re, im]`.
pub fn serialize_complex<S: Serializer>(z: &Complex64, serializer: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(serializer)
}

/// Serde helper: serialize through `Display` (used for big integers).
pub fn serialize_display<T: Display, S: Serializer>(value: &T, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2f64.sqrt() * 2.0), "2.82842712475");
        assert_eq!(fmt_num(123456789012.4), "123456789012");
        assert_eq!(fmt_num(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_num(1.5e-7), "1.5e-07");
        assert_eq!(fmt_num(0.9999999999999), "1");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn round_trip_precision() {
        for &x in &[std::f64::consts::PI, 1.5198177547, 3.3219280949, 6.02e23, 1e-300] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!((back / x - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn fixed() {
        assert_eq!(fmt_fixed(3.32192809488736, 10), "3.3219280949");
    }
}
