//! Exact rational helpers: parsing, `n/d` and decimal rendering, rounding.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `n`, `n/d` or a finite decimal such as `-2.828`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = |why: &str| Error::Parse {
        line: 0,
        message: format!("cannot parse `{text}` as a rational: {why}"),
    };
    let t = text.trim();
    if t.is_empty() {
        return Err(bad("empty"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if (digits.is_empty() && frac.is_empty())
            || !digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad("bad decimal"));
        }
        let joined = format!("{digits}{frac}");
        let mut n: BigInt = joined.parse().map_err(|_| bad("bad decimal"))?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(Rational::new(n, d));
    }
    let n: BigInt = t.parse().map_err(|_| bad("not a number"))?;
    Ok(Rational::from_integer(n))
}

/// `n/d`, or just `n` for integers.
pub fn fmt_fraction(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rounds to the nearest integer, ties away from zero.
pub fn round_half_away(r: &Rational) -> BigInt {
    let two = BigInt::from(2);
    let twice = r * Rational::from_integer(two.clone());
    // floor((2|r| + 1) / 2) with the sign restored
    let mag = (twice.abs() + Rational::one()) / Rational::from_integer(two);
    let m = mag.floor().to_integer();
    if r.is_negative() {
        -m
    } else {
        m
    }
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), e as usize)
}

/// floor(log10(|r|)) for r != 0.
fn decimal_exponent(r: &Rational) -> i64 {
    let a = r.abs();
    let ten = int(10);
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let scaled = |e: i64| {
        if e >= 0 {
            Rational::from_integer(pow10(e as u32))
        } else {
            Rational::new(BigInt::one(), pow10((-e) as u32))
        }
    };
    while scaled(e) > a {
        e -= 1;
    }
    while scaled(e) * &ten <= a {
        e += 1;
    }
    e
}

/// Decimal rendering with `sig` significant digits (half away from zero),
/// trailing zeros removed.
pub fn fmt_decimal(r: &Rational, sig: u32) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let e = decimal_exponent(r);
    let shift = sig as i64 - 1 - e;
    let scale = |s: i64| {
        if s >= 0 {
            Rational::from_integer(pow10(s as u32))
        } else {
            Rational::new(BigInt::one(), pow10((-s) as u32))
        }
    };
    let mut digits = round_half_away(&(r.abs() * scale(shift)));
    let mut shift = shift;
    if digits >= pow10(sig) {
        // rounding carried into a new leading digit
        shift -= 1;
        digits = round_half_away(&(r.abs() * scale(shift)));
    }
    let s = digits.to_string();
    let body = if shift <= 0 {
        format!("{}{}", s, "0".repeat((-shift) as usize))
    } else {
        let shift = shift as usize;
        let (int_part, frac_part) = if s.len() > shift {
            let (a, b) = s.split_at(s.len() - shift);
            (a.to_string(), b.to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat(shift - s.len()), s))
        };
        let frac_part = frac_part.trim_end_matches('0');
        if frac_part.is_empty() {
            int_part
        } else {
            format!("{int_part}.{frac_part}")
        }
    };
    if r.is_negative() {
        format!("-{body}")
    } else {
        body
    }
}

/// `n/d (decimal)` with 12 significant digits, or just `n` for integers.
pub fn fmt_both(r: &Rational) -> String {
    if r.is_integer() {
        fmt_fraction(r)
    } else {
        format!("{} ({})", fmt_fraction(r), fmt_decimal(r, 12))
    }
}

/// Lower rational bound on sqrt(n) with `digits` correct decimal places.
pub fn sqrt_lower(n: u64, digits: u32) -> Rational {
    let scale = pow10(digits);
    let radicand = BigInt::from(n) * &scale * &scale;
    Rational::new(radicand.sqrt(), scale)
}

/// Decimal string of sqrt(2) - 1 to 12 significant digits.
pub fn sqrt2_minus_one_decimal() -> String {
    fmt_decimal(&(sqrt_lower(2, 40) - Rational::one()), 12)
}

pub fn to_f64(r: &Rational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Clears denominators and divides out the common gcd.
pub fn primitive_integers(values: &[Rational]) -> Vec<BigInt> {
    let lcm = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = values
        .iter()
        .map(|v| (v * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

pub fn sign(r: &Rational) -> Sign {
    if r.is_zero() {
        Sign::NoSign
    } else if r.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}
