//! Exact conversions between decimal strings and binary64 values.

use num_bigint::BigUint;
use num_traits::Zero;
use std::cmp::Ordering;

/// Largest decimal exponent accepted by the parser.
const MAX_EXP: i64 = 4000;

/// A parsed decimal literal `(-1)^neg * digits * 10^exp`.
struct Decimal {
    neg: bool,
    digits: BigUint,
    exp: i64,
}

fn parse_decimal(s: &str) -> Option<Decimal> {
    let s = s.trim();
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let exp = exp.checked_sub(frac.len() as i64)?;
    if exp.abs() > MAX_EXP {
        return None;
    }
    let all: String = int.chars().chain(frac.chars()).collect();
    let digits = BigUint::parse_bytes(all.as_bytes(), 10)?;
    Some(Decimal { neg, digits, exp })
}

/// Decomposes a finite, nonzero `|x|` as `m * 2^e` with integer `m`.
fn decompose(x: f64) -> (u64, i64) {
    let bits = x.abs().to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

fn pow_u(base: u32, e: u64) -> BigUint {
    num_traits::pow(BigUint::from(base), e as usize)
}

/// Compares `|d|` with `|x|` exactly.
fn cmp_abs(d: &Decimal, x: f64) -> Ordering {
    if x == 0.0 {
        return if d.digits.is_zero() { Ordering::Equal } else { Ordering::Greater };
    }
    let (m, e) = decompose(x);
    let mut lhs = d.digits.clone();
    let mut rhs = BigUint::from(m);
    if d.exp >= 0 {
        lhs *= pow_u(10, d.exp as u64);
    } else {
        rhs *= pow_u(10, (-d.exp) as u64);
    }
    if e >= 0 {
        rhs <<= e as u64;
    } else {
        lhs <<= (-e) as u64;
    }
    lhs.cmp(&rhs)
}

/// Returns the tightest pair of adjacent doubles `(lo, hi)` with `lo <= v <= hi`
/// for the decimal value `v` of `s`. The pair is degenerate when `v` is a double.
pub fn enclose(s: &str) -> Option<(f64, f64)> {
    let d = parse_decimal(s)?;
    let x: f64 = s.trim().parse().ok()?;
    if !x.is_finite() {
        return None;
    }
    if d.digits.is_zero() {
        return Some((x, x));
    }
    // `x` is the nearest double, so it carries the sign of the literal.
    let ord = cmp_abs(&d, x);
    let ord = if d.neg { ord.reverse() } else { ord };
    Some(match ord {
        Ordering::Equal => (x, x),
        Ordering::Greater => (x, x.next_up()),
        Ordering::Less => (x.next_down(), x),
    })
}

/// Writes the exact decimal expansion of a finite double.
pub fn exact_string(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sign = if x < 0.0 { "-" } else { "" };
    let (m, e) = decompose(x);
    if e >= 0 {
        let v = BigUint::from(m) << (e as u64);
        return format!("{sign}{v}");
    }
    let places = (-e) as usize;
    let scaled = BigUint::from(m) * pow_u(5, places as u64);
    let mut digits = scaled.to_string();
    if digits.len() <= places {
        digits = "0".repeat(places - digits.len() + 1) + &digits;
    }
    let (int, frac) = digits.split_at(digits.len() - places);
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}
