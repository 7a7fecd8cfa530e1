//! Multiprecision helpers on top of MPFR/MPC: conversions, polynomial roots,
//! Gauss–Legendre rules.

use crate::poly::QPoly;
use crate::rat::{Q, Z};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub fn to_integer(n: &Z) -> Integer {
    let (sign, digits) = n.to_u32_digits();
    let mut r = Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == num_bigint::Sign::Minus {
        r = -r;
    }
    r
}

pub fn from_integer(n: &Integer) -> Z {
    let mut digits = vec![0u32; n.significant_digits::<u32>()];
    n.write_digits(&mut digits, rug::integer::Order::Lsf);
    let m = num_bigint::BigUint::from_slice(&digits);
    let s = if *n < 0 { num_bigint::Sign::Minus } else { num_bigint::Sign::Plus };
    Z::from_biguint(s, m)
}

pub fn to_rational(r: &Q) -> Rational {
    Rational::from((to_integer(r.numer()), to_integer(r.denom())))
}

pub fn fq(prec: u32, r: &Q) -> Float {
    Float::with_val(prec, to_rational(r))
}

pub fn cq(prec: u32, r: &Q) -> Complex {
    Complex::with_val(prec, (to_rational(r), 0))
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn czero(prec: u32) -> Complex {
    Complex::new(prec)
}

pub fn cone(prec: u32) -> Complex {
    Complex::with_val(prec, 1)
}

pub fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub fn cabs_f64(z: &Complex) -> f64 {
    cabs(z).to_f64()
}

pub fn to_c64(z: &Complex) -> (f64, f64) {
    (z.real().to_f64(), z.imag().to_f64())
}

/// log|r| for a nonzero rational, at `prec` bits.
pub fn log_abs_q(prec: u32, r: &Q) -> Float {
    let n = Float::with_val(prec + 16, to_integer(r.numer()).abs());
    let d = Float::with_val(prec + 16, to_integer(r.denom()));
    Float::with_val(prec, n.ln() - d.ln())
}

pub fn log_abs_z(prec: u32, n: &Z) -> Float {
    Float::with_val(prec, Float::with_val(prec + 16, to_integer(n).abs()).ln())
}

/// Horner evaluation of a rational polynomial at a complex point.
pub fn eval_q(p: &QPoly, x: &Complex) -> Complex {
    let prec = x.prec().0;
    let mut acc = czero(prec);
    for a in p.coeffs().iter().rev() {
        acc *= x;
        acc += to_rational(a);
    }
    acc
}

pub fn eval_c(c: &[Complex], x: &Complex) -> Complex {
    let prec = x.prec().0;
    let mut acc = czero(prec);
    for a in c.iter().rev() {
        acc *= x;
        acc += a;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("root iteration did not converge after {0} steps")]
    NoConvergence(usize),
    #[error("roots collide at working precision (separation {0:e})")]
    Collision(f64),
}

/// All complex roots of a squarefree rational polynomial by Aberth iteration.
/// Returned in lexicographic (re, im) order.
pub fn roots(p: &QPoly, prec: u32) -> Result<Vec<Complex>, RootError> {
    let m = p.degree().expect("roots of zero polynomial");
    if m == 0 {
        return Ok(vec![]);
    }
    let wp = prec + 32;
    let monic = p.monic();
    let c: Vec<Complex> = monic.coeffs().iter().map(|a| cq(wp, a)).collect();
    let dc: Vec<Complex> = monic.derivative().coeffs().iter().map(|a| cq(wp, a)).collect();
    let bound = 1.0
        + monic.coeffs()[..m]
            .iter()
            .map(|a| num_traits::ToPrimitive::to_f64(a).unwrap_or(f64::MAX).abs())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex> = (0..m)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4;
            let r = 0.5 * bound;
            Complex::with_val(wp, (r * th.cos(), r * th.sin()))
        })
        .collect();
    let tol = Float::with_val(wp, Float::i_exp(1, -(prec as i32) - 8));
    let max_iter = 200 + 4 * prec as usize;
    let mut converged = false;
    for _ in 0..max_iter {
        let mut worst = Float::new(wp);
        for k in 0..m {
            let pv = eval_c(&c, &z[k]);
            let dv = eval_c(&dc, &z[k]);
            if pv.is_zero() {
                continue;
            }
            let w = Complex::with_val(wp, &pv / &dv);
            let mut s = czero(wp);
            for j in 0..m {
                if j != k {
                    let d = Complex::with_val(wp, &z[k] - &z[j]);
                    s += d.recip();
                }
            }
            let denom = Complex::with_val(wp, 1 - Complex::with_val(wp, &w * &s));
            let step = Complex::with_val(wp, &w / &denom);
            let rel = Float::with_val(wp, cabs(&step) / (Float::with_val(wp, 1) + cabs(&z[k])));
            if rel > worst {
                worst = rel;
            }
            z[k] -= step;
        }
        if worst < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(RootError::NoConvergence(max_iter));
    }
    // Newton polish
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let pv = eval_c(&c, zk);
            let dv = eval_c(&dc, zk);
            if dv.is_zero() {
                break;
            }
            *zk -= Complex::with_val(wp, &pv / &dv);
        }
    }
    let mut out: Vec<Complex> = z.into_iter().map(|v| Complex::with_val(prec, v)).collect();
    let mut sep = f64::INFINITY;
    for i in 0..m {
        for j in i + 1..m {
            sep = sep.min(cabs_f64(&Complex::with_val(prec, &out[i] - &out[j])));
        }
    }
    let eps = 2f64.powi(-(prec as i32) / 2);
    if sep <= eps {
        return Err(RootError::Collision(sep));
    }
    // treat tiny imaginary parts as zero for real roots of real polynomials
    let thin = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 16));
    for r in out.iter_mut() {
        if Float::with_val(prec, r.imag().abs_ref()) < thin {
            r.mut_imag().assign_zero();
        }
    }
    out.sort_by(|a, b| {
        let (ar, ai) = to_c64(a);
        let (br, bi) = to_c64(b);
        if (ar - br).abs() > 1e-12 * (1.0 + ar.abs()) {
            ar.partial_cmp(&br).unwrap()
        } else {
            ai.partial_cmp(&bi).unwrap()
        }
    });
    Ok(out)
}

trait AssignZero {
    fn assign_zero(&mut self);
}

impl AssignZero for Float {
    fn assign_zero(&mut self) {
        *self = Float::new(self.prec());
    }
}

type GlRule = Arc<Vec<(Float, Float)>>;

fn gl_cache() -> &'static Mutex<HashMap<(usize, u32), GlRule>> {
    static C: OnceLock<Mutex<HashMap<(usize, u32), GlRule>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre nodes and weights on [-1, 1] with `n` points at `prec` bits.
pub fn gauss_legendre(n: usize, prec: u32) -> GlRule {
    if let Some(r) = gl_cache().lock().unwrap().get(&(n, prec)) {
        return r.clone();
    }
    let wp = prec + 32;
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(wp, guess);
        let mut dp = Float::new(wp);
        for it in 0..200 {
            let (p, d) = legendre(n, &x);
            let dx = Float::with_val(wp, &p / &d);
            x -= &dx;
            dp = d;
            if dx.is_zero() || (dx.get_exp().unwrap_or(i32::MIN) < -(wp as i32) + 4 && it > 2) {
                let (_, d) = legendre(n, &x);
                dp = d;
                break;
            }
        }
        let one_m = Float::with_val(wp, 1 - Float::with_val(wp, x.square_ref()));
        let w = Float::with_val(wp, 2 / (one_m * Float::with_val(wp, dp.square_ref())));
        rule.push((Float::with_val(prec, x), Float::with_val(prec, w)));
    }
    let r = Arc::new(rule);
    gl_cache().lock().unwrap().insert((n, prec), r.clone());
    r
}

fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let wp = x.prec();
    let mut p0 = Float::with_val(wp, 1);
    let mut p1 = x.clone();
    if n == 0 {
        return (p0, Float::new(wp));
    }
    for k in 2..=n {
        let kf = k as u32;
        let t = Float::with_val(wp, (2 * kf - 1) * Float::with_val(wp, x * &p1));
        let p2 = Float::with_val(wp, (t - (kf - 1) * p0) / kf);
        p0 = p1;
        p1 = p2;
    }
    let num = Float::with_val(wp, n as u32 * (Float::with_val(wp, x * &p1) - &p0));
    let den = Float::with_val(wp, Float::with_val(wp, x.square_ref()) - 1);
    (p1, num / den)
}

/// Real `n`-th root of a nonnegative float.
pub fn nth_root(x: &Float, n: u32) -> Float {
    let prec = x.prec();
    if x.is_zero() {
        return Float::new(prec);
    }
    let l = Float::with_val(prec, x.ln_ref());
    Float::with_val(prec, (l / n).exp())
}

pub fn pow_i(x: &Complex, e: i64) -> Complex {
    let prec = x.prec().0;
    if e >= 0 {
        Complex::with_val(prec, x.pow(e as u64))
    } else {
        Complex::with_val(prec, x.pow(-e as u64)).recip()
    }
}

/// Decimal digits needed to display `prec` bits.
pub fn digits_for(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn integer_roundtrip() {
        let n: Z = "-123456789012345678901234567890".parse().unwrap();
        assert_eq!(from_integer(&to_integer(&n)), n);
    }

    #[test]
    fn cubic_roots() {
        let f = QPoly::from_ints(&[0, -1, 0, 1]);
        let r = roots(&f, 128).unwrap();
        let vals: Vec<f64> = r.iter().map(|z| z.real().to_f64()).collect();
        assert!((vals[0] + 1.0).abs() < 1e-30 && vals[1].abs() < 1e-30 && (vals[2] - 1.0).abs() < 1e-30);
        let f = QPoly::from_ints(&[1, 0, 0, 0, 0, 1]);
        let r = roots(&f, 200).unwrap();
        for z in &r {
            let v = eval_q(&f, z);
            assert!(cabs_f64(&v) < 1e-55);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(20, 160);
        let mut s = Float::new(160);
        for (x, w) in rule.iter() {
            s += Float::with_val(160, w * Float::with_val(160, x.pow(38u32)));
        }
        let exact = Float::with_val(160, 2) / 39u32;
        let err = Float::with_val(160, s - exact).abs().to_f64();
        assert!(err < 1e-45, "{err}");
        let _ = q(1);
    }
}
