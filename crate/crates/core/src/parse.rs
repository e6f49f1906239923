//! Parsing of real-valued inputs into rigorous enclosures.
//!
//! Decimal literals that are exactly representable become point intervals;
//! all others become the two neighbouring floating point numbers. Simple
//! products and quotients with the constant `pi` are supported, for example
//! `pi/3`, `-3*pi/8` or `2.5e-3`.

use crate::error::{Error, Result};
use crate::interval::RealInterval;

/// Splits a decimal literal into its significant digits and the decimal
/// exponent of the last digit, after removing leading and trailing zeros.
fn normalize_decimal(s: &str) -> Option<(String, i64)> {
    let s = s.trim().trim_start_matches('+');
    let s = s.strip_prefix('-').unwrap_or(s);
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut digits = format!("{int_part}{frac_part}");
    let mut exponent = exp - frac_part.len() as i64;
    let trimmed = digits.trim_start_matches('0').to_string();
    digits = trimmed;
    if digits.is_empty() {
        return Some((String::new(), 0));
    }
    while digits.ends_with('0') {
        digits.pop();
        exponent += 1;
    }
    Some((digits, exponent))
}

/// Enclosure of a decimal literal; a point interval when the literal is exactly representable.
pub fn parse_decimal(s: &str) -> Result<RealInterval> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("not a decimal number: {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("number out of range: {s:?}")));
    }
    let given = normalize_decimal(s).ok_or_else(|| Error::Config(format!("not a decimal number: {s:?}")))?;
    let exact = normalize_decimal(&format!("{:.1100e}", x)).expect("formatted float is decimal");
    if given == exact {
        Ok(RealInterval::point(x))
    } else {
        Ok(RealInterval::around(x))
    }
}

fn parse_factor(tok: &str) -> Result<RealInterval> {
    let t = tok.trim();
    if t.eq_ignore_ascii_case("pi") {
        Ok(RealInterval::pi())
    } else {
        parse_decimal(t)
    }
}

/// Parses an expression `[-] f1 (op f2)*` with `op ∈ {*, /}` and factors that
/// are decimals or `pi`, returning an enclosure of its value.
pub fn parse_real(expr: &str) -> Result<RealInterval> {
    let e = expr.trim();
    if e.is_empty() {
        return Err(Error::Config("empty numeric expression".into()));
    }
    let (neg, body) = match e.strip_prefix('-') {
        Some(rest) if !rest.trim_start().starts_with(|c: char| c.is_ascii_digit() || c == '.') => {
            (true, rest)
        }
        _ => (false, e),
    };
    let mut acc: Option<RealInterval> = None;
    let mut op = '*';
    let mut start = 0;
    let bytes: Vec<char> = body.chars().collect();
    let mut i = 0;
    while i <= bytes.len() {
        let at_end = i == bytes.len();
        let is_op = !at_end && (bytes[i] == '*' || bytes[i] == '/');
        if at_end || is_op {
            let tok: String = bytes[start..i].iter().collect();
            let v = parse_factor(&tok)?;
            acc = Some(match acc {
                None => v,
                Some(a) if op == '*' => a * v,
                Some(a) => a.checked_div(v)?,
            });
            if !at_end {
                op = bytes[i];
            }
            start = i + 1;
        }
        i += 1;
    }
    let v = acc.ok_or_else(|| Error::Config(format!("cannot parse {expr:?}")))?;
    Ok(if neg { -v } else { v })
}

/// Nearest floating point value of an expression.
pub fn parse_f64(expr: &str) -> Result<f64> {
    Ok(parse_real(expr)?.mid())
}
