//! Exact rational helpers: parsing, canonical text form, and decimal rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number used for every probability and utility value.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"num/den"`, `"num"` or a signed variant of either. Floating literals are rejected.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::MalformedRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = parse_int(num).ok_or_else(bad)?;
    let den: BigInt = parse_int(den).ok_or_else(bad)?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise (always reduced).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Positional decimal with 12 significant digits, rounded half-to-even, trailing zeros trimmed.
pub fn format_decimal(r: &Rational) -> String {
    format_decimal_digits(r, 12)
}

pub fn format_decimal_digits(r: &Rational, digits: u32) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let a = r.abs();
    let ten = BigInt::from(10);

    // exponent e with 10^e <= a < 10^(e+1)
    let mut e: i64 = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    loop {
        let lower = pow10(e);
        if a < lower {
            e -= 1;
            continue;
        }
        if a >= pow10(e + 1) {
            e += 1;
            continue;
        }
        break;
    }

    let shift = digits as i64 - 1 - e;
    let scaled = &a * pow10(shift);
    let mut m = round_half_even(&scaled);
    let mut shift = shift;
    if m == num_traits::pow(ten.clone(), digits as usize) {
        m /= &ten;
        shift -= 1;
    }

    let mut s = m.to_string();
    let text = if shift <= 0 {
        s.extend(std::iter::repeat_n('0', (-shift) as usize));
        s
    } else {
        let shift = shift as usize;
        if s.len() <= shift {
            let pad = "0".repeat(shift - s.len());
            s = format!("0.{pad}{s}");
        } else {
            s.insert(s.len() - shift, '.');
        }
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    };
    if negative {
        format!("-{text}")
    } else {
        text
    }
}

fn pow10(e: i64) -> Rational {
    let ten = BigInt::from(10);
    if e >= 0 {
        Rational::from_integer(num_traits::pow(ten, e as usize))
    } else {
        Rational::new(BigInt::one(), num_traits::pow(ten, (-e) as usize))
    }
}

fn round_half_even(x: &Rational) -> BigInt {
    let (q, r) = x.numer().div_rem(x.denom());
    let twice = &r * BigInt::from(2);
    match twice.cmp(x.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_rational("-2/4").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational(" +5/10 ").unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_floats_and_zero_denominators() {
        for bad in ["0.5", "1/0", "", "a/b", "1e3", "1//2", "/2"] {
            assert!(parse_rational(bad).is_err(), "{bad} should fail");
        }
    }

    #[test]
    fn canonical_form() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&ratio(-4, 2)), "-2");
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(&ratio(1, 3)), "0.333333333333");
        assert_eq!(format_decimal(&ratio(2, 3)), "0.666666666667");
        assert_eq!(format_decimal(&ratio(5, 2)), "2.5");
        assert_eq!(format_decimal(&ratio(-1, 4)), "-0.25");
        assert_eq!(format_decimal(&int(0)), "0");
        assert_eq!(format_decimal(&int(1200)), "1200");
        assert_eq!(format_decimal(&ratio(1, 24)), "0.0416666666667");
        // 0.5 at 1 digit -> 0 (half to even), 1.5 -> 2
        assert_eq!(format_decimal_digits(&ratio(5, 1), 1), "5");
        assert_eq!(format_decimal_digits(&ratio(25, 10), 1), "2");
        assert_eq!(format_decimal_digits(&ratio(35, 10), 1), "4");
        assert_eq!(format_decimal_digits(&ratio(999_999, 100_000), 2), "10");
    }
}
