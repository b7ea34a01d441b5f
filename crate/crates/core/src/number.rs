//! Exact rational scalars and decimal-string conversion.

use std::cmp::Ordering;

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

/// The scalar type used for every stored length, position, weight and coefficient.
pub type Q = BigRational;

/// Default number of significant digits used when serializing inexact values.
pub const DEFAULT_DIGITS: usize = 30;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow10(e: u32) -> BigInt {
    num::pow(BigInt::from(10u32), e as usize)
}

/// Parses a plain decimal string (`-12.5`, `3`, `1e-3`, `.25`) into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let value = if scale >= 0 {
        Q::from_integer(numer * pow10(scale as u32))
    } else {
        Q::new(numer, pow10((-scale) as u32))
    };
    Some(value)
}

/// If `x` has a terminating decimal expansion, returns it exactly.
fn exact_decimal(x: &Q) -> Option<String> {
    let mut den = x.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while den.is_multiple_of(&two) {
        den /= &two;
        twos += 1;
    }
    while den.is_multiple_of(&five) {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = (x * Q::from_integer(pow10(places))).to_integer();
    Some(render_scaled(&scaled, places))
}

fn render_scaled(n: &BigInt, places: u32) -> String {
    let negative = n.sign() == Sign::Minus;
    let digits = n.abs().to_string();
    let places = places as usize;
    let body = if places == 0 {
        digits
    } else if digits.len() > places {
        let (a, b) = digits.split_at(digits.len() - places);
        format!("{a}.{b}")
    } else {
        format!("0.{}{}", "0".repeat(places - digits.len()), digits)
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if negative && body != "0" {
        format!("-{body}")
    } else {
        body
    }
}

/// Floor of log10 |x| for nonzero x.
pub fn decimal_exponent(x: &Q) -> i64 {
    let a = x.abs();
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    loop {
        let lower = pow10_q(e);
        if a < lower {
            e -= 1;
        } else if a >= pow10_q(e + 1) {
            e += 1;
        } else {
            return e;
        }
    }
}

/// The rational with the smallest denominator in the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Q, hi: &Q) -> Q {
    debug_assert!(lo <= hi);
    if !lo.is_positive() && !hi.is_negative() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    let next = &fl + Q::one();
    if next <= *hi {
        return next;
    }
    &fl + Q::one() / simplest_between(&(Q::one() / (hi - &fl)), &(Q::one() / (lo - &fl)))
}

pub fn pow10_q(e: i64) -> Q {
    if e >= 0 {
        Q::from_integer(pow10(e as u32))
    } else {
        Q::new(BigInt::one(), pow10((-e) as u32))
    }
}

/// Rounds `x` to `digits` significant digits (half away from zero).
pub fn round_significant(x: &Q, digits: usize) -> Q {
    if x.is_zero() {
        return Q::zero();
    }
    let e = decimal_exponent(x);
    let shift = digits as i64 - 1 - e;
    let scaled = x * pow10_q(shift);
    let rounded = scaled.round();
    rounded * pow10_q(-shift)
}

/// Serializes a rational: exactly when the decimal expansion terminates within
/// `digits` significant digits, otherwise rounded to `digits` significant digits.
pub fn format_decimal(x: &Q, digits: usize) -> String {
    let digits = digits.max(1);
    if let Some(s) = exact_decimal(x) {
        let significant = s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len();
        if significant <= digits {
            return s;
        }
    }
    let r = round_significant(x, digits);
    exact_decimal(&r).expect("rounded value has a terminating expansion")
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator/denominator overflow f64 separately; scale down first
        let n = x.numer().bits() as i64;
        let d = x.denom().bits() as i64;
        let shift = (n - d).clamp(-1000, 1000);
        let scaled = if shift >= 0 {
            x / Q::from_integer(BigInt::one() << shift as usize)
        } else {
            x * Q::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    })
}

/// Exact conversion of a finite double.
pub fn from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

pub fn sign(x: &Q) -> Ordering {
    x.cmp(&Q::zero())
}

/// Relative deviation |a - b| / max(|a|, |b|), zero when both vanish.
pub fn relative_deviation(a: &Q, b: &Q) -> Q {
    let scale = a.abs().max(b.abs());
    if scale.is_zero() {
        Q::zero()
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&frac(1, 3), &frac(1, 2)), frac(1, 2));
        assert_eq!(simplest_between(&frac(3, 10), &frac(34, 100)), frac(1, 3));
        assert_eq!(simplest_between(&frac(-7, 5), &frac(-6, 5)), frac(-4, 3));
        assert_eq!(simplest_between(&frac(-1, 5), &frac(1, 7)), q(0));
        assert_eq!(simplest_between(&frac(5, 2), &frac(5, 2)), frac(5, 2));
    }

    #[test]
    fn parses_plain_and_scientific() {
        assert_eq!(parse_decimal("0.5"), Some(frac(1, 2)));
        assert_eq!(parse_decimal("-12.25"), Some(frac(-49, 4)));
        assert_eq!(parse_decimal("4"), Some(q(4)));
        assert_eq!(parse_decimal(".25"), Some(frac(1, 4)));
        assert_eq!(parse_decimal("1e-3"), Some(frac(1, 1000)));
        assert_eq!(parse_decimal("2.5E2"), Some(q(250)));
        assert_eq!(parse_decimal(""), None);
        assert_eq!(parse_decimal("1/2"), None);
        assert_eq!(parse_decimal("."), None);
        assert_eq!(parse_decimal("0x10"), None);
    }

    #[test]
    fn formats_terminating_values_exactly() {
        assert_eq!(format_decimal(&frac(1, 2), 30), "0.5");
        assert_eq!(format_decimal(&q(4), 30), "4");
        assert_eq!(format_decimal(&frac(-3, 8), 30), "-0.375");
        assert_eq!(format_decimal(&q(0), 30), "0");
        assert_eq!(format_decimal(&q(1200), 2), "1200");
    }

    #[test]
    fn rounds_repeating_values() {
        assert_eq!(format_decimal(&frac(1, 3), 5), "0.33333");
        assert_eq!(format_decimal(&frac(2, 3), 5), "0.66667");
        assert_eq!(format_decimal(&frac(-200, 3), 4), "-66.67");
        assert_eq!(format_decimal(&frac(6, 11), 30), "0.545454545454545454545454545455");
    }

    #[test]
    fn decimal_exponent_matches_magnitude() {
        assert_eq!(decimal_exponent(&q(1)), 0);
        assert_eq!(decimal_exponent(&q(999)), 2);
        assert_eq!(decimal_exponent(&frac(1, 1000)), -3);
        assert_eq!(decimal_exponent(&frac(-99, 1000)), -2);
    }

    #[test]
    fn round_trip_through_decimal() {
        let x = frac(123456789, 1024);
        assert_eq!(parse_decimal(&format_decimal(&x, 40)), Some(x));
    }
}
