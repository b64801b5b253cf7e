//! Arbitrary-precision scalars and their text encodings.
//!
//! All geometry runs on MPFR floats. The cluster features shrink like
//! `16^(-2^n)`, so a fixed-width float cannot represent even a depth-5
//! truncation. Two text encodings are supported: decimal strings for user
//! input and lowercase hex-floats (`0x1.8p-3`) for bit-exact interchange.

use std::cmp::Ordering;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};

pub type Scalar = Float;

/// Smallest precision handed to MPFR by this crate.
pub const MIN_PRECISION: u32 = 64;

/// Default mantissa width for truncations whose deepest cluster has depth
/// `depth_max`: `2^(depth_max+2) + 64*(depth_max+1)` bits.
pub fn default_precision(depth_max: u32) -> u32 {
    let depth_max = depth_max.min(24);
    (1u32 << (depth_max + 2)) + 64 * (depth_max + 1)
}

pub fn int(v: i64, prec: u32) -> Scalar {
    Float::with_val(prec, v)
}

/// `2^exp`, exact.
pub fn pow2(exp: i32, prec: u32) -> Scalar {
    Float::with_val(prec, 1) << exp
}

pub fn pi(prec: u32) -> Scalar {
    Float::with_val(prec, Constant::Pi)
}

pub fn ln2(prec: u32) -> Scalar {
    Float::with_val(prec, Constant::Log2)
}

/// `base^exp` for a small integer base, correctly rounded.
pub fn int_pow(base: u32, exp: i32, prec: u32) -> Scalar {
    Float::with_val(prec, base).pow(exp)
}

/// `x^exp` at the precision of `x`, correctly rounded.
pub fn powi(x: &Scalar, exp: i32) -> Scalar {
    Float::with_val(x.prec(), x.pow(exp))
}

pub fn cmp(a: &Scalar, b: &Scalar) -> Ordering {
    a.total_cmp(b)
}

/// Sorts ascending and merges exact duplicates.
pub fn sort_dedup(values: &mut Vec<Scalar>) {
    values.sort_by(cmp);
    values.dedup_by(|a, b| a == b);
}

pub fn is_strictly_ascending(values: &[Scalar]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

fn is_decimal_literal(s: &str) -> bool {
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if int_part.is_empty() && frac_part.is_empty() {
        return false;
    }
    if !digits(int_part) || !digits(frac_part) {
        return false;
    }
    match exponent {
        None => true,
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            !e.is_empty() && digits(e)
        }
    }
}

/// Parses a decimal string such as `"0.7"`, `"-1.5e-3"` into a scalar
/// rounded once to `prec` bits. Binary-float intermediates are never used.
pub fn parse_decimal(s: &str, prec: u32) -> Result<Scalar> {
    let t = s.trim();
    if !is_decimal_literal(t) {
        return Err(Error::Parse(format!("not a decimal number: {s:?}")));
    }
    let parsed = Float::parse(t).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

/// Decimal rendering with `digits` significant digits.
pub fn to_decimal(x: &Scalar, digits: usize) -> String {
    x.to_string_radix(10, Some(digits))
}

/// Lowercase hex-float rendering (`0x1.<hex>p<exp>`); exact for every finite value.
pub fn to_hex(x: &Scalar) -> String {
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x.is_zero() {
        return format!("{sign}0x0p+0");
    }
    let (mantissa, exp) = x
        .to_integer_exp()
        .expect("hex encoding requires a finite value");
    let mantissa = mantissa.abs();
    let bits = mantissa.significant_bits();
    let unit_exp = i64::from(exp) + i64::from(bits) - 1;
    let frac_bits = bits - 1;
    let mut out = format!("{sign}0x1");
    if frac_bits > 0 {
        let fraction = mantissa - (Integer::from(1) << frac_bits);
        let nibbles = frac_bits.div_ceil(4);
        let shifted = fraction << (4 * nibbles - frac_bits);
        let hex = format!("{:0>width$}", shifted.to_string_radix(16), width = nibbles as usize);
        let hex = hex.trim_end_matches('0');
        if !hex.is_empty() {
            out.push('.');
            out.push_str(hex);
        }
    }
    out.push_str(&format!("p{unit_exp:+}"));
    out
}

/// Parses a hex-float. Fails rather than rounds when the mantissa does not
/// fit in `prec` bits, so a successful parse is always bit-exact.
pub fn parse_hex(s: &str, prec: u32) -> Result<Scalar> {
    let bad = || Error::Parse(format!("not a hex-float: {s:?}"));
    let t = s.trim();
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let body = body
        .strip_prefix("0x")
        .or_else(|| body.strip_prefix("0X"))
        .ok_or_else(bad)?;
    let (mantissa, exp) = body.split_once(['p', 'P']).ok_or_else(bad)?;
    let exp: i64 = exp.parse().map_err(|_| bad())?;
    let (int_digits, frac_digits) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_digits}{frac_digits}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(bad());
    }
    let m = Integer::from_str_radix(&digits, 16).map_err(|_| bad())?;
    let mut value = if m == 0 {
        Float::with_val(prec, 0)
    } else {
        let trailing = m.find_one(0).unwrap_or(0);
        let needed = m.significant_bits() - trailing;
        if needed > prec {
            return Err(Error::Precision {
                context: format!("hex literal {s:?} needs {needed} bits"),
                bits: prec,
            });
        }
        let shift = exp - 4 * frac_digits.len() as i64;
        let shift = i32::try_from(shift).map_err(|_| bad())?;
        Float::with_val(prec, m) << shift
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_formula() {
        assert_eq!(default_precision(6), 704);
        assert_eq!(default_precision(8), 1600);
    }

    #[test]
    fn hex_known_values() {
        assert_eq!(to_hex(&int(1, 64)), "0x1p+0");
        assert_eq!(to_hex(&Float::with_val(64, 0.375)), "0x1.8p-2");
        assert_eq!(to_hex(&Float::with_val(64, -10)), "-0x1.4p+3");
        assert_eq!(to_hex(&int(0, 64)), "0x0p+0");
        let x = parse_hex("0x1.8p-2", 64).unwrap();
        assert_eq!(x, 0.375);
        assert_eq!(parse_hex("-0x3p+1", 64).unwrap(), -6);
    }

    #[test]
    fn hex_rejects_overlong_mantissa() {
        let x = parse_decimal("0.1", 200).unwrap();
        let text = to_hex(&x);
        assert!(matches!(parse_hex(&text, 64), Err(Error::Precision { .. })));
        assert_eq!(parse_hex(&text, 200).unwrap(), x);
    }

    #[test]
    fn decimal_syntax() {
        assert!(parse_decimal("0.7", 64).is_ok());
        assert!(parse_decimal("-1.5e-3", 64).is_ok());
        assert!(parse_decimal(".5", 64).is_ok());
        for bad in ["", "abc", "1..2", "inf", "nan", "0x10", "1e", "--1"] {
            assert!(parse_decimal(bad, 64).is_err(), "{bad}");
        }
    }

    #[test]
    fn decimal_is_rounded_once() {
        let a = parse_decimal("0.1", 300).unwrap();
        let mut b = int(1, 300);
        b /= 10;
        assert_eq!(a, b);
    }
}
