//! Dense univariate polynomials over Q and Z, ascending coefficients.

use crate::rat::{Q, Z};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    c: Vec<Q>,
}

impl QPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn zero() -> Self {
        QPoly { c: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(a: Q) -> Self {
        Self::new(vec![a])
    }

    pub fn x() -> Self {
        Self::new(vec![Q::zero(), Q::one()])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| Q::from_integer(Z::from(v))).collect())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.c.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * Q::from_integer(Z::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(self.c.iter().map(|a| a * s).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut r = Self::one();
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        r
    }

    /// p(x + t).
    pub fn shift(&self, t: &Q) -> Self {
        let mut r = Self::zero();
        let lin = Self::new(vec![t.clone(), Q::one()]);
        for a in self.c.iter().rev() {
            r = &(&r * &lin) + &Self::constant(a.clone());
        }
        r
    }

    /// Euclidean division by a nonzero polynomial.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.c.len() - 1;
        let lc = d.lc();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut qv = vec![Q::zero(); r.len() - dd];
        for i in (0..qv.len()).rev() {
            let t = &r[i + dd] / &lc;
            if !t.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[i + j] -= &t * b;
                }
            }
            qv[i] = t;
        }
        r.truncate(dd);
        (Self::new(qv), Self::new(r))
    }

    /// Exact division; `None` if the remainder is nonzero.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (qq, r) = self.divrem(d);
        r.is_zero().then_some(qq)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lc();
        self.scale(&(Q::one() / l))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Primitive integer polynomial proportional to self, with positive leading coefficient.
    pub fn primitive(&self) -> ZPoly {
        let den = self.c.iter().fold(Z::one(), |acc, a| acc.lcm(a.denom()));
        let ints: Vec<Z> = self.c.iter().map(|a| (a * Q::from_integer(den.clone())).to_integer()).collect();
        ZPoly::new(ints).primitive_part()
    }

    pub fn to_zpoly_scaled(&self) -> (ZPoly, Z) {
        let den = self.c.iter().fold(Z::one(), |acc, a| acc.lcm(a.denom()));
        let ints = self.c.iter().map(|a| (a * Q::from_integer(den.clone())).to_integer()).collect();
        (ZPoly::new(ints), den)
    }
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly::new(self.c.iter().map(|a| -a).collect())
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut r = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        QPoly::new(r)
    }
}

impl std::fmt::Display for QPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "({a})*x")?,
                _ => write!(f, "({a})*x^{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZPoly {
    c: Vec<Z>,
}

impl ZPoly {
    pub fn new(mut c: Vec<Z>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        ZPoly { c }
    }

    pub fn zero() -> Self {
        ZPoly { c: vec![] }
    }

    pub fn one() -> Self {
        ZPoly { c: vec![Z::one()] }
    }

    pub fn coeffs(&self) -> &[Z] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> Z {
        self.c.last().cloned().unwrap_or_else(Z::zero)
    }

    pub fn content(&self) -> Z {
        self.c.iter().fold(Z::zero(), |acc, a| acc.gcd(a))
    }

    /// Divide out the content and fix the sign so the leading coefficient is positive.
    pub fn primitive_part(&self) -> ZPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut ct = self.content();
        if self.lc().is_negative() {
            ct = -ct;
        }
        ZPoly::new(self.c.iter().map(|a| a / &ct).collect())
    }

    pub fn scale(&self, s: &Z) -> ZPoly {
        ZPoly::new(self.c.iter().map(|a| a * s).collect())
    }

    pub fn div_scalar_exact(&self, s: &Z) -> ZPoly {
        ZPoly::new(
            self.c
                .iter()
                .map(|a| {
                    let (qq, r) = a.div_rem(s);
                    debug_assert!(r.is_zero(), "inexact scalar division");
                    qq
                })
                .collect(),
        )
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(self.c.iter().map(|a| Q::from_integer(a.clone())).collect())
    }

    pub fn eval(&self, x: &Z) -> Z {
        let mut acc = Z::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> Z {
        self.c.iter().map(|a| a.abs()).max().unwrap_or_else(Z::zero)
    }

    pub fn l1_norm(&self) -> Z {
        self.c.iter().map(|a| a.abs()).fold(Z::zero(), |s, a| s + a)
    }

    /// Exact division in Z[x]; `None` if not exact.
    pub fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return None;
        }
        let lc = d.lc();
        let mut r = self.c.clone();
        let mut qv = vec![Z::zero(); r.len() - dd];
        for i in (0..qv.len()).rev() {
            let (t, rem) = r[i + dd].div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            if !t.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[i + j] -= &t * b;
                }
            }
            qv[i] = t;
        }
        if r[..dd].iter().any(|a| !a.is_zero()) {
            return None;
        }
        Some(ZPoly::new(qv))
    }
}

impl Add for &ZPoly {
    type Output = ZPoly;
    fn add(self, o: &ZPoly) -> ZPoly {
        let n = self.c.len().max(o.c.len());
        let z0 = Z::zero();
        ZPoly::new((0..n).map(|i| self.c.get(i).unwrap_or(&z0) + o.c.get(i).unwrap_or(&z0)).collect())
    }
}

impl Sub for &ZPoly {
    type Output = ZPoly;
    fn sub(self, o: &ZPoly) -> ZPoly {
        let n = self.c.len().max(o.c.len());
        let z0 = Z::zero();
        ZPoly::new((0..n).map(|i| self.c.get(i).unwrap_or(&z0) - o.c.get(i).unwrap_or(&z0)).collect())
    }
}

impl Mul for &ZPoly {
    type Output = ZPoly;
    fn mul(self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut r = vec![Z::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        ZPoly::new(r)
    }
}

/// Resultant of two polynomials over Q by the Euclidean remainder sequence.
pub fn resultant(f: &QPoly, g: &QPoly) -> Q {
    if f.is_zero() || g.is_zero() {
        return Q::zero();
    }
    let mut a = f.clone();
    let mut b = g.clone();
    let mut acc = Q::one();
    loop {
        let da = a.degree().unwrap();
        let db = match b.degree() {
            Some(d) => d,
            None => return Q::zero(),
        };
        if db == 0 {
            return acc * num_traits::pow(b.lc(), da);
        }
        if da < db {
            if (da * db) % 2 == 1 {
                acc = -acc;
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let (_, r) = a.divrem(&b);
        if r.is_zero() {
            return Q::zero();
        }
        let dr = r.degree().unwrap();
        // res(a,b) = (-1)^{da db} lc(b)^{da-dr} res(b,r)
        if (da * db) % 2 == 1 {
            acc = -acc;
        }
        acc *= num_traits::pow(b.lc(), da - dr);
        a = b;
        b = r;
    }
}

/// Subresultant pseudo-remainder sequence over Z; returns res(f, g).
pub fn subresultant_resultant(f: &ZPoly, g: &ZPoly) -> Z {
    if f.is_zero() || g.is_zero() {
        return Z::zero();
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    let mut sign = Z::one();
    if a.degree() < b.degree() {
        if (a.degree().unwrap() * b.degree().unwrap()) % 2 == 1 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if b.degree() == Some(0) {
        return sign * num_traits::pow(b.lc(), a.degree().unwrap());
    }
    let mut gg = Z::one();
    let mut h = Z::one();
    loop {
        let da = a.degree().unwrap();
        let db = b.degree().unwrap();
        let delta = da - db;
        if (da * db) % 2 == 1 {
            sign = -sign;
        }
        let r = pseudo_rem(&a, &b);
        if r.is_zero() {
            return Z::zero();
        }
        let denom = &gg * num_traits::pow(h.clone(), delta);
        let r = r.div_scalar_exact(&denom);
        a = b;
        b = r;
        gg = a.lc();
        // h <- g^delta / h^(delta-1)
        h = if delta == 0 {
            h
        } else {
            num_traits::pow(gg.clone(), delta) / num_traits::pow(h.clone(), delta - 1)
        };
        let dbn = b.degree().unwrap();
        if dbn == 0 {
            let da = a.degree().unwrap();
            // res = sign * lc(b)^{da} / h^{da-1}, handled by final step of the sequence
            let num = num_traits::pow(b.lc(), da);
            let den = if da == 0 { Z::one() } else { num_traits::pow(h.clone(), da - 1) };
            return sign * num / den;
        }
    }
}

fn pseudo_rem(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let da = a.degree().unwrap();
    let db = b.degree().unwrap();
    let lb = b.lc();
    let mut r = a.c.clone();
    let mut k = da as i64 - db as i64 + 1;
    let mut dr = da as i64;
    while dr >= db as i64 && !r.iter().all(|x| x.is_zero()) {
        let t = r[dr as usize].clone();
        for x in r.iter_mut() {
            *x *= &lb;
        }
        for (j, bj) in b.c.iter().enumerate() {
            r[dr as usize - db + j] -= &t * bj;
        }
        k -= 1;
        while dr >= 0 && r[dr as usize].is_zero() {
            dr -= 1;
        }
        if dr < 0 {
            break;
        }
    }
    let scale = num_traits::pow(lb, k.max(0) as usize);
    ZPoly::new(r.into_iter().map(|x| x * &scale).collect())
}

/// Discriminant of a polynomial over Q: (-1)^{m(m-1)/2} res(f, f') / lc(f).
pub fn discriminant(f: &QPoly) -> Q {
    let m = f.degree().expect("discriminant of zero polynomial");
    if m == 0 {
        return Q::zero();
    }
    let (fz, den) = f.to_zpoly_scaled();
    let fzp = f.derivative().scale(&Q::from_integer(den.clone()));
    let (fpz, den2) = fzp.to_zpoly_scaled();
    debug_assert!(den2.is_one());
    let res = subresultant_resultant(&fz, &fpz);
    // disc(c f) = c^{2m-2} disc(f)
    let mut d = Q::from_integer(res) / Q::from_integer(fz.lc());
    if (m * (m - 1) / 2) % 2 == 1 {
        d = -d;
    }
    d / num_traits::pow(Q::from_integer(den), 2 * m - 2)
}
