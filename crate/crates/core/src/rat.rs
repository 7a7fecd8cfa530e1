//! Exact rational helpers: parsing, formatting, valuations.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Q = BigRational;
pub type Z = BigInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("cannot parse rational `{0}`")]
    BadNumber(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn q(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(Z::from(n), Z::from(d))
}

pub fn z(n: i64) -> Z {
    Z::from(n)
}

/// Parse `"p/q"`, an integer, or a finite decimal such as `-1.25` or `3e-2`.
pub fn parse_rational(s: &str) -> Result<Q, ParseError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseError::BadNumber(s.to_string()));
    }
    if let Some((a, b)) = t.split_once('/') {
        let n: Z = a.trim().parse().map_err(|_| ParseError::BadNumber(s.to_string()))?;
        let d: Z = b.trim().parse().map_err(|_| ParseError::BadNumber(s.to_string()))?;
        if d.is_zero() {
            return Err(ParseError::ZeroDenominator(s.to_string()));
        }
        return Ok(Q::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..].parse().map_err(|_| ParseError::BadNumber(s.to_string()))?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(ParseError::BadNumber(s.to_string()));
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(ParseError::BadNumber(s.to_string()));
    }
    let digits = format!("{ip}{fp}");
    let mut n: Z = if digits.is_empty() { Z::zero() } else { digits.parse().unwrap() };
    if neg {
        n = -n;
    }
    let e = exp - fp.len() as i64;
    let ten = Z::from(10);
    let r = if e >= 0 {
        Q::from_integer(n * num_traits::pow(ten, e as usize))
    } else {
        Q::new(n, num_traits::pow(ten, (-e) as usize))
    };
    Ok(r)
}

/// `p/q` form, or a bare integer when the denominator is 1.
pub fn fmt_rational(r: &Q) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// p-adic valuation of a nonzero integer.
pub fn ord_int(n: &Z, p: u64) -> i64 {
    assert!(!n.is_zero(), "valuation of zero");
    let pz = BigUint::from(p);
    let mut m = n.magnitude().clone();
    let mut k = 0;
    loop {
        let (qq, r) = m.div_rem(&pz);
        if !r.is_zero() {
            return k;
        }
        m = qq;
        k += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn ord(r: &Q, p: u64) -> i64 {
    ord_int(r.numer(), p) - ord_int(r.denom(), p)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, b);
            }
            b = mulm(b, b);
            e >>= 1;
        }
        r
    };
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'w: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'w;
            }
        }
        return false;
    }
    true
}

/// Prime factors found by trial division up to `bound`, plus the unfactored cofactor.
pub fn small_prime_factors(n: &Z, bound: u64) -> (Vec<u64>, Z) {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m.is_zero() {
        return (out, m);
    }
    let mut p = 2u64;
    while p <= bound {
        let pz = Z::from(p);
        if (&m % &pz).is_zero() {
            out.push(p);
            while (&m % &pz).is_zero() {
                m /= &pz;
            }
        }
        if &pz * &pz > m {
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > Z::one() {
        if let Some(v) = m.to_u64() {
            if v <= bound.saturating_mul(bound) || is_prime(v) {
                out.push(v);
                m = Z::one();
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    (out, m)
}

pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Z {
    xs.into_iter().fold(Z::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn binomial(n: i64, k: i64) -> Z {
    if k < 0 || n < 0 || k > n {
        return Z::zero();
    }
    let k = k.min(n - k);
    let mut r = Z::one();
    for i in 0..k {
        r = r * Z::from(n - i) / Z::from(i + 1);
    }
    r
}

/// Generalized binomial coefficient C(1/2, k).
pub fn binomial_half(k: usize) -> Q {
    let mut r = Q::one();
    let half = qf(1, 2);
    for i in 0..k {
        r = r * (&half - q(i as i64)) / q(i as i64 + 1);
    }
    r
}

pub fn sign_of(n: &Z) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), qf(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), qf(-5, 4));
        assert_eq!(parse_rational("2e3").unwrap(), q(2000));
        assert_eq!(parse_rational("1.5E-1").unwrap(), qf(3, 20));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(ord(&qf(12, 5), 2), 2);
        assert_eq!(ord(&qf(12, 25), 5), -2);
        assert_eq!(ord(&q(7), 3), 0);
    }

    #[test]
    fn primes_and_binomials() {
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 998_244_353));
        assert_eq!(binomial(7, 3), z(35));
        assert_eq!(binomial_half(2), qf(-1, 8));
        let (ps, rest) = small_prime_factors(&z(-108), 1000);
        assert_eq!(ps, vec![2, 3]);
        assert!(rest.is_one());
    }
}
