//! Decimal strings with an explicit exponent, `d.ddddE±n`, no locale.

use rug::{Complex, Float};

/// `x` with `digits` significant decimal digits.
pub fn float(x: &Float, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    if x.is_zero() {
        return "0.0E+0".into();
    }
    let s = format!("{:.*e}", digits.max(1) - 1, x);
    let (mant, exp) = s.split_once('e').expect("exponent");
    let e: i64 = exp.parse().expect("integer exponent");
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mant),
    };
    let (head, tail) = mant.split_once('.').unwrap_or((mant, ""));
    let tail = tail.trim_end_matches('0');
    let tail = if tail.is_empty() { "0" } else { tail };
    let es = if e < 0 { '-' } else { '+' };
    format!("{sign}{head}.{tail}E{es}{}", e.abs())
}

/// All decimal digits carried by the precision of `x`.
pub fn float_full(x: &Float) -> String {
    float(x, crate::mp::digits_for(x.prec()))
}

pub fn f64(x: f64) -> String {
    float(&Float::with_val(53, x), 17)
}

pub fn complex_full(z: &Complex) -> [String; 2] {
    [float_full(z.real()), float_full(z.imag())]
}

/// Parses the output of `float` (and plain decimals).
pub fn parse(s: &str, prec: u32) -> Option<Float> {
    let t = s.trim();
    Float::parse(t).ok().map(|v| Float::with_val(prec, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_form() {
        assert_eq!(f64(1.0), "1.0E+0");
        assert_eq!(f64(-0.25), "-2.5E-1");
        assert_eq!(f64(1234.5), "1.2345E+3");
        assert_eq!(f64(0.0), "0.0E+0");
        let x = Float::with_val(256, 2).ln();
        let s = float_full(&x);
        assert!(s.starts_with("6.931471805599453094172321214581765680755"), "{s}");
        assert!(s.ends_with("E-1"));
        let back = parse(&s, 256).unwrap();
        assert!(Float::with_val(256, back - &x).abs() < 1e-75);
    }
}
