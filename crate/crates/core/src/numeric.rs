//! Multiprecision helpers shared by the numeric evaluator and the quadrature oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use rug::ops::Pow;
use rug::Float;

/// Mantissa bits needed for `digits` decimal digits.
pub fn bits_for(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

pub fn bigint_to_float(n: &BigInt, prec: u32) -> Float {
    let parsed = Float::parse(n.to_string()).expect("decimal integer");
    Float::with_val(prec, parsed)
}

pub fn rational_to_float(q: &BigRational, prec: u32) -> Float {
    let num = bigint_to_float(q.numer(), prec);
    let den = bigint_to_float(q.denom(), prec);
    num / den
}

/// `10^{-e}` at the given precision.
pub fn ten_pow_neg(e: i32, prec: u32) -> Float {
    Float::with_val(prec, 10).pow(-e)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi)
}

/// Relative discrepancy `|a-b| / max(|a|, |b|, 1)`.
pub fn relerr(a: &Float, b: &Float) -> Float {
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    let mut scale = Float::with_val(prec, a.abs_ref());
    let bb = Float::with_val(prec, b.abs_ref());
    if bb > scale {
        scale = bb;
    }
    if scale < 1 {
        scale = Float::with_val(prec, 1);
    }
    diff / scale
}

/// Shortest readable decimal rendering with `digits` significant digits.
pub fn format_float(x: &Float, digits: u32) -> String {
    x.to_string_radix(10, Some(digits as usize))
}

/// Parse a decimal literal such as `0.3`, `-2`, `1/2` or `2.5e-1` into an exact rational.
pub fn parse_decimal_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::from(0) } else { digits.parse().ok()? };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_decimal_rational("0.3"), Some(q(3, 10)));
        assert_eq!(parse_decimal_rational("-1/2"), Some(q(-1, 2)));
        assert_eq!(parse_decimal_rational("2.2"), Some(q(11, 5)));
        assert_eq!(parse_decimal_rational("25e-2"), Some(q(1, 4)));
        assert_eq!(parse_decimal_rational("abc"), None);
    }

    #[test]
    fn relerr_uses_unit_floor() {
        let a = Float::with_val(64, 1e-30);
        let b = Float::with_val(64, 0);
        assert!(relerr(&a, &b) < 1e-29);
    }
}
