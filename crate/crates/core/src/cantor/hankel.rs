//! Determinant engines: fraction-free Bareiss over an exact ring, and a
//! multimodular evaluation/interpolation engine for polynomial Hankel matrices.

use crate::poly::{QPoly, ZPoly};
use crate::rat::{is_prime, Z};
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

pub trait ExactRing: Clone {
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Division known to be exact.
    fn div_exact(&self, o: &Self) -> Self;
}

impl ExactRing for ZPoly {
    fn one() -> Self {
        ZPoly::one()
    }
    fn is_zero(&self) -> bool {
        ZPoly::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        self.scale(&-Z::one())
    }
    fn div_exact(&self, o: &Self) -> Self {
        if o.degree() == Some(0) {
            return self.div_scalar_exact(&o.lc());
        }
        ZPoly::div_exact(self, o).expect("inexact Bareiss division")
    }
}

impl ExactRing for QPoly {
    fn one() -> Self {
        QPoly::one()
    }
    fn is_zero(&self) -> bool {
        QPoly::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        QPoly::div_exact(self, o).expect("inexact Bareiss division")
    }
}

impl ExactRing for rug::Integer {
    fn one() -> Self {
        rug::Integer::from(1)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(&self, o: &Self) -> Self {
        rug::Integer::from(self * o)
    }
    fn sub(&self, o: &Self) -> Self {
        rug::Integer::from(self - o)
    }
    fn neg(&self) -> Self {
        rug::Integer::from(-self)
    }
    fn div_exact(&self, o: &Self) -> Self {
        rug::Integer::from(self.div_exact_ref(o))
    }
}

/// Fraction-free Gaussian elimination; every intermediate entry is a minor.
pub fn bareiss<T: ExactRing>(mut a: Vec<Vec<T>>) -> T {
    let n = a.len();
    if n == 0 {
        return T::one();
    }
    let mut sign = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = !sign;
                }
                None => return T::one().sub(&T::one()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        d.neg()
    } else {
        d
    }
}

/// Arithmetic modulo an odd prime p < 2^62 in Montgomery form (R = 2^64).
#[derive(Clone, Copy, Debug)]
pub struct Mont {
    p: u64,
    pinv: u64,
    r2: u64,
}

impl Mont {
    pub fn new(p: u64) -> Self {
        assert!(p % 2 == 1 && p < (1 << 62));
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Mont { p, pinv: inv.wrapping_neg(), r2 }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.pinv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub fn one(&self) -> u64 {
        self.to_mont(1)
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    pub fn reduce_z(&self, z: &Z) -> u64 {
        let pz = Z::from(self.p);
        let r = z.mod_floor(&pz).to_u64().unwrap();
        self.to_mont(r)
    }
}

/// Distinct primes just below 2^62, descending.
pub fn primes_62(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c: u64 = (1 << 62) - 1;
    while out.len() < count {
        if is_prime(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

/// Determinant of an m x m matrix mod p, entries in Montgomery form.
fn det_mod(mt: &Mont, a: &mut [u64], m: usize) -> u64 {
    let mut det = mt.one();
    for k in 0..m {
        let Some(piv) = (k..m).find(|&i| a[i * m + k] != 0) else { return 0 };
        if piv != k {
            for j in 0..m {
                a.swap(k * m + j, piv * m + j);
            }
            det = mt.sub(0, det);
        }
        let pk = a[k * m + k];
        det = mt.mul(det, pk);
        let inv = mt.inv(pk);
        for i in k + 1..m {
            let f = mt.mul(a[i * m + k], inv);
            if f == 0 {
                continue;
            }
            for j in k + 1..m {
                let t = mt.mul(f, a[k * m + j]);
                a[i * m + j] = mt.sub(a[i * m + j], t);
            }
        }
    }
    det
}

/// Coefficients (mod p, standard form) of the polynomial taking values `vals` at 0..n-1.
fn interpolate_mod(mt: &Mont, vals: &[u64]) -> Vec<u64> {
    let n = vals.len();
    let mut dd: Vec<u64> = vals.to_vec();
    // divided differences on nodes 0..n-1: denominators are (i - i + j) = j... use x_i = i
    let xs: Vec<u64> = (0..n as u64).map(|i| mt.to_mont(i)).collect();
    for j in 1..n {
        let invj = mt.inv(mt.to_mont(j as u64));
        for i in (j..n).rev() {
            let d = mt.sub(dd[i], dd[i - 1]);
            dd[i] = mt.mul(d, invj);
        }
    }
    // Newton form to monomials: p = dd[0] + (x - x0)(dd[1] + (x - x1)(...)).
    let mut c = vec![0u64; n];
    for k in (0..n).rev() {
        // c <- c * (x - x_k) + dd[k]
        let xk = xs[k];
        let mut carry = 0u64;
        for coef in c.iter_mut().take(n - k) {
            let cur = *coef;
            *coef = mt.sub(carry, mt.mul(cur, xk));
            carry = cur;
        }
        c[0] = mt.add(c[0], dd[k]);
    }
    c.into_iter().map(|v| mt.from_mont(v)).collect()
}

/// Degree bound for det of a matrix with entry degrees deg[r][c].
fn degree_bound(deg: &[Vec<Option<usize>>]) -> usize {
    let m = deg.len();
    // try additive structure deg[r][c] <= a_r + b_c
    let row_max: usize = deg.iter().map(|row| row.iter().flatten().copied().max().unwrap_or(0)).sum();
    if m == 0 {
        return 0;
    }
    if let Some(d00) = deg[0][0] {
        let a: Vec<Option<usize>> = deg.iter().map(|row| row[0]).collect();
        let b: Vec<Option<i64>> = deg[0].iter().map(|d| d.map(|d| d as i64 - d00 as i64)).collect();
        if a.iter().all(|x| x.is_some()) && b.iter().all(|x| x.is_some()) {
            let ok = (0..m).all(|r| {
                (0..m).all(|c| match deg[r][c] {
                    None => true,
                    Some(d) => d as i64 <= a[r].unwrap() as i64 + b[c].unwrap(),
                })
            });
            if ok {
                let s: i64 = a.iter().map(|x| x.unwrap() as i64).sum::<i64>() + b.iter().map(|x| x.unwrap()).sum::<i64>();
                return (s.max(0) as usize).min(row_max);
            }
        }
    }
    row_max
}

/// det of the k x k Hankel matrix (seq[r + c]) over Z[x], by evaluation at
/// 0..=D modulo many 62-bit primes, interpolation, and Chinese remaindering.
pub fn hankel_det_modular(seq: &[ZPoly], k: usize) -> ZPoly {
    if k == 0 {
        return ZPoly::one();
    }
    assert!(seq.len() >= 2 * k - 1);
    let deg: Vec<Vec<Option<usize>>> = (0..k).map(|r| (0..k).map(|c| seq[r + c].degree()).collect()).collect();
    let d = degree_bound(&deg);
    // coefficient bound: product over rows of sum of l1 norms
    let norms: Vec<Z> = seq[..2 * k - 1].iter().map(|p| p.l1_norm()).collect();
    let mut bound = Z::one();
    for r in 0..k {
        let s: Z = (0..k).map(|c| norms[r + c].clone()).fold(Z::zero(), |a, b| a + b);
        bound *= s.max(Z::one());
    }
    let bits = bound.bits() as usize + 2;
    let nprimes = bits.div_ceil(61);
    let primes = primes_62(nprimes);
    let residues: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|&p| {
            let mt = Mont::new(p);
            let red: Vec<Vec<u64>> = seq[..2 * k - 1]
                .iter()
                .map(|poly| poly.coeffs().iter().map(|c| mt.reduce_z(c)).collect())
                .collect();
            let mut vals = Vec::with_capacity(d + 1);
            let mut ev = vec![0u64; 2 * k - 1];
            let mut mat = vec![0u64; k * k];
            for xi in 0..=d as u64 {
                let x = mt.to_mont(xi);
                for (e, poly) in ev.iter_mut().zip(&red) {
                    let mut acc = 0u64;
                    for &c in poly.iter().rev() {
                        acc = mt.add(mt.mul(acc, x), c);
                    }
                    *e = acc;
                }
                for r in 0..k {
                    for c in 0..k {
                        mat[r * k + c] = ev[r + c];
                    }
                }
                vals.push(det_mod(&mt, &mut mat, k));
            }
            interpolate_mod(&mt, &vals)
        })
        .collect();
    crt_coefficients(&primes, &residues)
}

/// Combine residues (coefficient-wise) into symmetric-range integers.
pub fn crt_coefficients(primes: &[u64], residues: &[Vec<u64>]) -> ZPoly {
    let n = residues[0].len();
    let mut coeffs = vec![Z::zero(); n];
    let mut modulus = Z::one();
    for (pi, &p) in primes.iter().enumerate() {
        let pz = Z::from(p);
        let minv = {
            let mm = (&modulus % &pz).to_u64().unwrap();
            modinv(mm, p)
        };
        for (i, c) in coeffs.iter_mut().enumerate() {
            let cur = (&*c).mod_floor(&pz).to_u64().unwrap();
            let r = residues[pi][i];
            let diff = ((r as u128 + p as u128 - cur as u128) % p as u128) as u64;
            let t = ((diff as u128 * minv as u128) % p as u128) as u64;
            *c += &modulus * Z::from(t);
        }
        modulus *= &pz;
    }
    let half = &modulus >> 1;
    for c in coeffs.iter_mut() {
        if *c > half {
            *c -= &modulus;
        }
    }
    ZPoly::new(coeffs)
}

fn modinv(a: u64, p: u64) -> u64 {
    let mut r = 1u128;
    let mut b = a as u128 % p as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u128;
        }
        b = b * b % p as u128;
        e >>= 1;
    }
    r as u64
}

/// ℓ1 bound check helper for callers: max |coefficient|.
pub fn max_abs(p: &ZPoly) -> Z {
    p.coeffs().iter().map(|c| c.abs()).max().unwrap_or_else(Z::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(c: &[i64]) -> ZPoly {
        ZPoly::new(c.iter().map(|&v| Z::from(v)).collect())
    }

    #[test]
    fn montgomery_basics() {
        let p = primes_62(1)[0];
        let mt = Mont::new(p);
        let a = mt.to_mont(123456789);
        let b = mt.to_mont(987654321);
        assert_eq!(mt.from_mont(mt.mul(a, b)), ((123456789u128 * 987654321u128) % p as u128) as u64);
        assert_eq!(mt.from_mont(mt.mul(a, mt.inv(a))), 1);
    }

    #[test]
    fn integer_bareiss() {
        let m: Vec<Vec<rug::Integer>> = [[2, 3, 1], [4, 1, 5], [0, 7, 2]]
            .iter()
            .map(|r| r.iter().map(|&v| rug::Integer::from(v)).collect())
            .collect();
        // 2(2-35) - 3(8-0) + 1(28-0) = -66 - 24 + 28
        assert_eq!(bareiss(m), -62);
        let m: Vec<Vec<rug::Integer>> = [[0, 1], [1, 0]].iter().map(|r| r.iter().map(|&v| rug::Integer::from(v)).collect()).collect();
        assert_eq!(bareiss(m), -1);
    }

    #[test]
    fn modular_matches_bareiss() {
        let seq = vec![zp(&[1, 2, 3]), zp(&[-4, 0, 5, 1]), zp(&[7, -1, 0, 0, 2]), zp(&[3, 3, 3, 3, 3, -9]), zp(&[11, 0, -2, 0, 0, 0, 1])];
        for k in 1..=3 {
            let m: Vec<Vec<ZPoly>> = (0..k).map(|r| (0..k).map(|c| seq[r + c].clone()).collect()).collect();
            assert_eq!(hankel_det_modular(&seq, k), bareiss(m), "k={k}");
        }
    }
}
