//! Cantor's division polynomials for y^2 = F(x), F monic of degree 2g+1.
//!
//! The series S(z) = sum_j P_j(x) (2y)^{1-2j} z^j with S^2 = F(x - z) gives
//! polynomials P_j; psi_n is a Hankel determinant in P_{g+1}, ..., P_{n-1}.

pub mod cache;
pub mod hankel;

use crate::curve::{CurveError, SuperellipticCurve};
use crate::mp;
use crate::mpoly::MPoly;
use crate::place::Place;
use crate::poly::{QPoly, ZPoly};
use crate::rat::{self, binomial, q, Q, Z};
use num_traits::{One, Signed, Zero};
use rug::{Float, Integer};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CantorError {
    #[error("series coefficient is not a polynomial")]
    NonPolynomialResult,
    #[error("n = {n} is below the genus {g}")]
    IndexBelowGenus { n: usize, g: usize },
    #[error("value is not a root of f")]
    NotARoot,
    #[error("psi_{0} vanishes at the given point")]
    ZeroEncountered(usize),
    #[error("Catalan Hankel identity fails for l={0}, m={1}")]
    MismatchedIdentity(usize, usize),
    #[error("invalid truncation order")]
    BadOrder,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// E_1(x, z) = (F(x - z) - F(x)) / z as coefficients in z.
pub fn e1_coefficients(f: &QPoly) -> Vec<QPoly> {
    // [z^i] E_1 = (-1)^{i+1} F^{(i+1)} / (i+1)!
    let m = f.degree().unwrap_or(0);
    let mut out = Vec::with_capacity(m);
    let mut d = f.clone();
    let mut fact = Q::one();
    for i in 0..m {
        d = d.derivative();
        fact *= q(i as i64 + 1);
        let sign = if i % 2 == 0 { -Q::one() } else { Q::one() };
        out.push(d.scale(&(sign / &fact)));
    }
    out
}

/// E_1 as a bivariate polynomial in (x, z).
pub fn e1_polynomial(f: &QPoly) -> MPoly {
    let mut p = MPoly::zero(2);
    for (i, c) in e1_coefficients(f).iter().enumerate() {
        for (j, a) in c.coeffs().iter().enumerate() {
            p.add_term(vec![j as u32, i as u32], a.clone());
        }
    }
    p
}

/// Coefficients of sqrt(1 + z E_1 / F) as numerator / F^fpow.
#[derive(Clone, Debug, PartialEq)]
pub struct FSeries {
    pub order: usize,
    pub coeffs: Vec<(QPoly, usize)>,
}

impl FSeries {
    /// Undo the normalization: numerator over F^j.
    fn numerator_over_fj(&self, f: &QPoly, j: usize) -> QPoly {
        let (num, fp) = &self.coeffs[j];
        num * &f.pow(j - fp)
    }

    /// Check F * (series)^2 = F(x - z) through the truncation order.
    pub fn verify_square(&self, f: &QPoly) -> bool {
        let e = e1_coefficients(f);
        let nums: Vec<QPoly> = (0..=self.order).map(|j| self.numerator_over_fj(f, j)).collect();
        for j in 1..=self.order {
            let mut s = QPoly::zero();
            for a in 0..=j {
                s = &s + &(&nums[a] * &nums[j - a]);
            }
            // coefficient of z^j of F(series)^2 is s / F^{j-1}; of F(x - z) is e_{j-1}
            let rhs = match e.get(j - 1) {
                Some(c) => c * &f.pow(j - 1),
                None => QPoly::zero(),
            };
            if s != rhs {
                return false;
            }
        }
        true
    }
}

fn normalize(num: QPoly, fpow: usize, f: &QPoly) -> (QPoly, usize) {
    let mut num = num;
    let mut fpow = fpow;
    while fpow > 0 && !num.is_zero() {
        match num.div_exact(f) {
            Some(qq) => {
                num = qq;
                fpow -= 1;
            }
            None => break,
        }
    }
    if num.is_zero() {
        fpow = 0;
    }
    (num, fpow)
}

/// Series by the recursion 2N_j = e_{j-1} F^{j-1} - sum_{i=1}^{j-1} N_i N_{j-i}.
pub fn series_recursive(f: &QPoly, order: usize) -> FSeries {
    let e = e1_coefficients(f);
    let mut n: Vec<QPoly> = vec![QPoly::one()];
    let mut fpows = vec![QPoly::one()];
    for j in 1..=order {
        fpows.push(&fpows[j - 1] * f);
        let mut acc = match e.get(j - 1) {
            Some(c) => c * &fpows[j - 1],
            None => QPoly::zero(),
        };
        for i in 1..j {
            acc = &acc - &(&n[i] * &n[j - i]);
        }
        n.push(acc.scale(&rat::qf(1, 2)));
    }
    FSeries { order, coeffs: n.into_iter().enumerate().map(|(j, p)| normalize(p, j, f)).collect() }
}

/// Series by direct binomial expansion sum_k C(1/2,k) z^k E_1^k / F^k.
pub fn series_binomial(f: &QPoly, order: usize) -> FSeries {
    let e = e1_coefficients(f);
    // E_1^k truncated to z-degree `order`, k = 0..=order
    let mut pow: Vec<QPoly> = vec![QPoly::one()];
    pow.resize(order + 1, QPoly::zero());
    let mut nums = vec![QPoly::zero(); order + 1];
    let fp: Vec<QPoly> = (0..=order).scan(QPoly::one(), |s, i| {
        let cur = s.clone();
        if i < order {
            *s = &*s * f;
        }
        Some(cur)
    }).collect();
    for k in 0..=order {
        let ck = rat::binomial_half(k);
        // contribution to z^j for j = k + i: C(1/2,k) [z^i] E_1^k F^{j-k} / F^j
        for i in 0..=order - k {
            if pow[i].is_zero() {
                continue;
            }
            let j = k + i;
            let t = (&pow[i] * &fp[j - k]).scale(&ck);
            nums[j] = &nums[j] + &t;
        }
        // pow <- pow * E_1 (truncated)
        if k < order {
            let mut next = vec![QPoly::zero(); order + 1];
            for (a, pa) in pow.iter().enumerate() {
                if pa.is_zero() {
                    continue;
                }
                for (b, eb) in e.iter().enumerate() {
                    if a + b > order {
                        break;
                    }
                    next[a + b] = &next[a + b] + &(pa * eb);
                }
            }
            pow = next;
        }
    }
    FSeries { order, coeffs: nums.into_iter().enumerate().map(|(j, p)| normalize(p, j, f)).collect() }
}

/// P_0..P_J with P_j = (-1)^{g+1} 2^{2j-1} F^j c_j.
#[derive(Clone, Debug, PartialEq)]
pub struct PjTable {
    pub g: usize,
    pub p: Vec<QPoly>,
}

fn genus_of(f: &QPoly) -> usize {
    (f.degree().unwrap() - 1) / 2
}

pub fn pj_from_series(f: &QPoly, s: &FSeries) -> Result<PjTable, CantorError> {
    let g = genus_of(f);
    let sign = if g % 2 == 1 { Q::one() } else { -Q::one() };
    let mut p = Vec::with_capacity(s.order + 1);
    for (j, (num, fpow)) in s.coeffs.iter().enumerate() {
        // F^j * num / F^fpow
        if *fpow > j {
            return Err(CantorError::NonPolynomialResult);
        }
        let poly = num * &f.pow(j - fpow);
        let two = if j == 0 { rat::qf(1, 2) } else { Q::from_integer(Z::one() << (2 * j - 1)) };
        p.push(poly.scale(&(&sign * two)));
    }
    Ok(PjTable { g, p })
}

/// Integer recursion M_j = 2^{2j-2} e_{j-1} F^{j-1} - sum M_i M_{j-i}, P_j = (-1)^{g+1} M_j.
fn pj_integral(f: &QPoly, order: usize) -> Vec<ZPoly> {
    let e: Vec<ZPoly> = e1_coefficients(f).iter().map(|c| c.to_zpoly_scaled().0).collect();
    let (fz, _) = f.to_zpoly_scaled();
    let mut m: Vec<ZPoly> = vec![ZPoly::zero()];
    let mut fpow = ZPoly::one();
    for j in 1..=order {
        let mut acc = match e.get(j - 1) {
            Some(c) => (c * &fpow).scale(&(Z::one() << (2 * j - 2))),
            None => ZPoly::zero(),
        };
        for i in 1..j {
            acc = &acc - &(&m[i] * &m[j - i]);
        }
        m.push(acc);
        fpow = &fpow * &fz;
    }
    m
}

pub fn pj_table(f: &QPoly, order: usize) -> Result<PjTable, CantorError> {
    if order < 1 {
        return Err(CantorError::BadOrder);
    }
    let g = genus_of(f);
    if f.coeffs().iter().all(|c| c.is_integer()) {
        let m = pj_integral(f, order);
        let sign = if g % 2 == 1 { Z::one() } else { -Z::one() };
        let mut p = vec![QPoly::constant(Q::new(sign.clone(), Z::from(2)))];
        for mj in &m[1..] {
            p.push(mj.scale(&sign).to_qpoly());
        }
        Ok(PjTable { g, p })
    } else {
        pj_from_series(f, &series_recursive(f, order))
    }
}

/// P_j via the derivative recursion for R_j(x, z); used as an independent check.
pub fn pj_by_r_recursion(f: &QPoly, order: usize) -> Vec<QPoly> {
    let g = genus_of(f);
    let shifted = {
        // F(x - z) in (x, z)
        let x = MPoly::var(2, 0);
        let z = MPoly::var(2, 1);
        let xz = x.sub(&z);
        let fm = MPoly::zero(1);
        let _ = fm;
        let mut acc = MPoly::zero(2);
        for (i, c) in f.coeffs().iter().enumerate() {
            acc = acc.add(&xz.pow(i as u32).scale(c));
        }
        acc
    };
    let dz = |p: &MPoly| -> MPoly {
        let mut r = MPoly::zero(2);
        for (e, c) in p.terms() {
            if e[1] > 0 {
                r.add_term(vec![e[0], e[1] - 1], c * q(e[1] as i64));
            }
        }
        r
    };
    // d/dz F(x - z) = -F'(x - z)
    let fprime_shift = dz(&shifted).scale(&-Q::one());
    let mut r = fprime_shift.scale(&-Q::one());
    let at_zero = |p: &MPoly| -> QPoly {
        let mut c = Vec::new();
        for (e, v) in p.terms() {
            if e[1] == 0 {
                let i = e[0] as usize;
                if c.len() <= i {
                    c.resize(i + 1, Q::zero());
                }
                c[i] = v.clone();
            }
        }
        QPoly::new(c)
    };
    let sign = if g % 2 == 1 { Q::one() } else { -Q::one() };
    let mut out = vec![QPoly::constant(&sign * rat::qf(1, 2))];
    for j in 1..=order {
        out.push(at_zero(&r).scale(&sign));
        if j < order {
            let t1 = dz(&r).mul(&shifted).scale(&q(2));
            let t2 = r.mul(&fprime_shift).scale(&q(2 * j as i64 - 1));
            r = t1.add(&t2).scale(&rat::qf(2, j as i64 + 1));
        }
    }
    out
}

pub fn catalan(m: usize) -> Z {
    binomial(2 * m as i64 + 1, m as i64) / Z::from(2 * m as i64 + 1)
}

pub fn catalan_table(mmax: usize) -> Vec<Z> {
    (0..=mmax).map(catalan).collect()
}

fn parity_start(n: usize, g: usize) -> (usize, usize) {
    // (first index, size) of the Hankel block
    if (n - g) % 2 == 0 {
        (g + 1, (n - g) / 2)
    } else {
        (g + 2, (n - g - 1) / 2)
    }
}

pub fn same_parity(n: usize, g: usize) -> bool {
    (n + g) % 2 == 0
}

pub fn psi_degree(n: usize, g: usize) -> usize {
    if same_parity(n, g) {
        g * (n * n - g * g) / 2
    } else {
        g * (n * n - (g + 1) * (g + 1)) / 2
    }
}

/// 2 d*(n), the exponent of F'(alpha) in psi_n(alpha)^2.
pub fn two_dstar(n: usize, g: usize) -> usize {
    if same_parity(n, g) {
        (n * n - g * g) / 2
    } else {
        (n * n - (g + 1) * (g + 1)) / 2
    }
}

/// Ramification multiplicity m(n): g(g-1)/2 or g(g+1)/2.
pub fn ramification_multiplicity(n: usize, g: usize) -> usize {
    if same_parity(n, g) {
        g * (g - 1) / 2
    } else {
        g * (g + 1) / 2
    }
}

pub fn sigma_ng(n: usize, g: usize) -> Z {
    let n = n as i64;
    let mut r = Z::one();
    if g % 2 == 0 {
        for k in 1..=(g / 2) as i64 {
            r *= binomial(n + 2 * k - 1, 4 * k - 1);
        }
    } else {
        for k in 0..=((g - 1) / 2) as i64 {
            r *= binomial(n + 2 * k, 4 * k + 1);
        }
    }
    r
}

pub fn b_closed(n: usize, g: usize) -> Q {
    let base = Q::new(sigma_ng(n, g), sigma_ng(g, g));
    if same_parity(n, g) {
        base
    } else {
        base / Q::from_integer(Z::one() << g)
    }
}

pub fn b0_closed(n: usize, g: usize) -> Q {
    if !same_parity(n, g) {
        return b_closed(n, g);
    }
    let base = Q::new(sigma_ng(n, g), sigma_ng(g, g));
    let mut num = Z::one();
    let mut den = Z::one();
    for i in 0..g {
        num *= Z::from(2 * i as i64 + 1);
        den *= Z::from(n as i64 - g as i64 + 1 + 2 * i as i64);
    }
    base * Q::new(num, den)
}

fn int_det(m: Vec<Vec<Z>>) -> Z {
    let mm: Vec<Vec<Integer>> = m.iter().map(|r| r.iter().map(mp::to_integer).collect()).collect();
    mp::from_integer(&hankel::bareiss(mm))
}

/// b_0(n) as the Catalan Hankel determinant.
pub fn b0_hankel(n: usize, g: usize) -> Z {
    let (s, k) = if same_parity(n, g) { (g, (n - g) / 2) } else { (g + 1, (n - g - 1) / 2) };
    let c = catalan_table(s + 2 * k + 1);
    int_det((0..k).map(|r| (0..k).map(|cc| c[s + r + cc].clone()).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalanHankel {
    pub l: usize,
    pub m: usize,
    pub det: String,
    pub product: String,
    pub equal: bool,
}

/// Hankel determinant of Catalan numbers c_{l+i+j} (size m) and the product
/// over 1 <= i <= j <= l-1 of (i+j+2m)/(i+j).
pub fn catalan_hankel_row(l: usize, m: usize) -> (Z, Q) {
    let c = catalan_table(l + 2 * m);
    let det = int_det((0..m).map(|r| (0..m).map(|cc| c[l + r + cc].clone()).collect()).collect());
    let mut prod = Q::one();
    for i in 1..l {
        for j in i..l {
            prod *= Q::new(Z::from(i + j + 2 * m), Z::from(i + j));
        }
    }
    (det, prod)
}

pub fn catalan_hankel(l: usize, m: usize) -> Result<(Z, Q), CantorError> {
    let (det, prod) = catalan_hankel_row(l, m);
    if Q::from_integer(det.clone()) != prod {
        return Err(CantorError::MismatchedIdentity(l, m));
    }
    Ok((det, prod))
}

pub fn catalan_report(l: usize, m: usize) -> CatalanHankel {
    let (det, prod) = catalan_hankel_row(l, m);
    CatalanHankel {
        l,
        m,
        det: det.to_string(),
        product: rat::fmt_rational(&prod),
        equal: Q::from_integer(det) == prod,
    }
}

pub fn t_set_contains(ell: u64, g: usize, n: usize) -> bool {
    if ell == 0 {
        return true;
    }
    (n + 1 - g..=n + g - 1).all(|k| k as u64 % ell != 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivisionPolynomial {
    pub n: usize,
    pub g: usize,
    pub psi: QPoly,
    pub b_n: Q,
    pub same_parity: bool,
}

impl DivisionPolynomial {
    pub fn degree(&self) -> usize {
        self.psi.degree().unwrap_or(0)
    }

    /// Degree and leading coefficient match the closed forms.
    pub fn check_invariants(&self) -> bool {
        self.degree() == psi_degree(self.n, self.g) && self.b_n == b_closed(self.n, self.g) && self.psi.lc() == self.b_n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Bareiss,
    Modular,
    Auto,
}

fn check_n(n: usize, g: usize) -> Result<(), CantorError> {
    if n < g {
        Err(CantorError::IndexBelowGenus { n, g })
    } else {
        Ok(())
    }
}

/// psi_n over Q[x] (curve coefficients need not be integral).
pub fn division_polynomial_with(f: &QPoly, n: usize, engine: Engine) -> Result<DivisionPolynomial, CantorError> {
    let g = genus_of(f);
    check_n(n, g)?;
    let (s, k) = parity_start(n, g);
    let psi = if k == 0 {
        QPoly::one()
    } else {
        let table = pj_table(f, s + 2 * k - 2)?;
        let integral = f.coeffs().iter().all(|c| c.is_integer());
        if integral {
            let seq: Vec<ZPoly> = (0..2 * k - 1).map(|i| table.p[s + i].to_zpoly_scaled().0).collect();
            let use_modular = match engine {
                Engine::Modular => true,
                Engine::Bareiss => false,
                Engine::Auto => k >= 5,
            };
            let d = if use_modular {
                hankel::hankel_det_modular(&seq, k)
            } else {
                hankel::bareiss((0..k).map(|r| (0..k).map(|c| seq[r + c].clone()).collect()).collect())
            };
            d.to_qpoly()
        } else {
            hankel::bareiss((0..k).map(|r| (0..k).map(|c| table.p[s + r + c].clone()).collect()).collect())
        }
    };
    let b_n = psi.lc();
    Ok(DivisionPolynomial { n, g, psi, b_n, same_parity: same_parity(n, g) })
}

pub fn division_polynomial(c: &SuperellipticCurve, n: usize) -> Result<DivisionPolynomial, CantorError> {
    c.require_hyperelliptic()?;
    division_polynomial_with(c.f(), n, Engine::Auto)
}

/// Exact rational value psi_n(beta) without forming psi_n.
pub fn psi_value(f: &QPoly, n: usize, beta: &Q) -> Result<Q, CantorError> {
    let g = genus_of(f);
    check_n(n, g)?;
    let (s, k) = parity_start(n, g);
    if k == 0 {
        return Ok(Q::one());
    }
    let jmax = s + 2 * k - 2;
    let sign = if g % 2 == 1 { 1 } else { -1 };
    if f.coeffs().iter().all(|c| c.is_integer()) {
        // scaled values M~_j = b^{2gj} M_j(beta), all integral
        let a = mp::to_integer(beta.numer());
        let b = mp::to_integer(beta.denom());
        let m = f.degree().unwrap();
        let horner_h = |p: &QPoly, deg: usize| -> Integer {
            // b^deg * p(a/b) for deg >= deg p
            let mut acc = Integer::new();
            let mut bpow = Integer::from(1);
            let cs = p.coeffs();
            let mut terms = Vec::with_capacity(deg + 1);
            for i in 0..=deg {
                let _ = i;
                terms.push(bpow.clone());
                bpow *= &b;
            }
            let mut apow = Integer::from(1);
            for (i, c) in cs.iter().enumerate() {
                let ci = mp::to_integer(&c.to_integer());
                acc += Integer::from(&ci * &apow) * &terms[deg - i];
                apow *= &a;
            }
            acc
        };
        let e = e1_coefficients(f);
        let ft = horner_h(f, m);
        let mut mt: Vec<Integer> = vec![Integer::new()];
        let mut fpow = Integer::from(1);
        for j in 1..=jmax {
            let mut acc = match e.get(j - 1) {
                Some(c) => {
                    let et = horner_h(c, m - j);
                    Integer::from(&et * &fpow) << (2 * j as u32 - 2)
                }
                None => Integer::new(),
            };
            for i in 1..=(j - 1) / 2 {
                acc -= Integer::from(&mt[i] * &mt[j - i]) * 2u32;
            }
            if j % 2 == 0 {
                acc -= Integer::from(mt[j / 2].square_ref());
            }
            mt.push(acc);
            fpow *= &ft;
        }
        let mat: Vec<Vec<Integer>> = (0..k)
            .map(|r| (0..k).map(|c| mt[s + r + c].clone()).collect())
            .collect();
        let mut det = hankel::bareiss(mat);
        if sign < 0 && k % 2 == 1 {
            det = -det;
        }
        let exp = 2 * g * (k * s + k * (k - 1));
        let den = Integer::from(rug::ops::Pow::pow(&b, exp as u32));
        Ok(Q::new(mp::from_integer(&det), mp::from_integer(&den)))
    } else {
        let e = e1_coefficients(f);
        let fb = f.eval(beta);
        let mut mv: Vec<Q> = vec![Q::zero()];
        let mut fpow = Q::one();
        for j in 1..=jmax {
            let mut acc = match e.get(j - 1) {
                Some(c) => c.eval(beta) * &fpow * Q::from_integer(Z::one() << (2 * j - 2)),
                None => Q::zero(),
            };
            for i in 1..j {
                acc -= &mv[i] * &mv[j - i];
            }
            mv.push(acc);
            fpow *= &fb;
        }
        let sq = if sign > 0 { Q::one() } else { -Q::one() };
        let (num_rows, den) = {
            let den = rat::lcm_denoms(mv.iter());
            let rows: Vec<Vec<Integer>> = (0..k)
                .map(|r| {
                    (0..k)
                        .map(|c| mp::to_integer(&(&mv[s + r + c] * Q::from_integer(den.clone())).to_integer()))
                        .collect()
                })
                .collect();
            (rows, den)
        };
        let det = mp::from_integer(&hankel::bareiss(num_rows));
        let val = Q::new(det, num_traits::pow(den, k)) * num_traits::pow(sq, k);
        Ok(val)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchIdentity {
    pub lhs: Q,
    pub rhs: Q,
    pub equal: bool,
}

pub fn eval_at_branch(f: &QPoly, alpha: &Q, n: usize) -> Result<BranchIdentity, CantorError> {
    if !f.eval(alpha).is_zero() {
        return Err(CantorError::NotARoot);
    }
    let g = genus_of(f);
    let v = psi_value(f, n, alpha)?;
    let lhs = &v * &v;
    let fp = f.derivative().eval(alpha);
    let b0 = b0_closed(n, g);
    let rhs = &b0 * &b0 * num_traits::pow(fp, two_dstar(n, g));
    let equal = lhs == rhs;
    Ok(BranchIdentity { lhs, rhs, equal })
}

/// Sum over q in H_n, q != o (and x(q) != beta when beta is a root) of
/// n_v log|x(q) - beta|_v, computed exactly from psi_n(beta).
pub fn division_sum(f: &QPoly, beta: &Q, n: usize, place: Place, prec: u32) -> Result<Float, CantorError> {
    let v = psi_value(f, n, beta)?;
    division_sum_from_value(f, beta, n, &v, place, prec)
}

/// `division_sum` with psi_n(beta) = v supplied, so several places can share one evaluation.
pub fn division_sum_from_value(f: &QPoly, beta: &Q, n: usize, v: &Q, place: Place, prec: u32) -> Result<Float, CantorError> {
    let g = genus_of(f);
    if v.is_zero() {
        return Err(CantorError::ZeroEncountered(n));
    }
    let fb = f.eval(beta);
    let extra = if fb.is_zero() { f.derivative().eval(beta) } else { fb };
    let b = b_closed(n, g);
    let mut s = Float::with_val(prec, 2 * Float::with_val(prec, place.log_abs(prec, v) - place.log_abs(prec, &b)));
    s += Float::with_val(prec, ramification_multiplicity(n, g) as u32 * place.log_abs(prec, &extra));
    Ok(s)
}

/// (1 / (g n^2)) times the division sum; tends to the integral of log|x - beta| against mu.
pub fn division_average(f: &QPoly, beta: &Q, n: usize, place: Place, prec: u32) -> Result<Float, CantorError> {
    let g = genus_of(f);
    let s = division_sum(f, beta, n, place, prec)?;
    Ok(Float::with_val(prec, s / (g * n * n) as u32))
}

/// log of the largest coefficient of the primitive integral form of psi_n.
pub fn divpoly_height(psi: &DivisionPolynomial) -> f64 {
    let z = psi.psi.primitive();
    let m = z.max_abs_coeff();
    if m.is_zero() {
        return 0.0;
    }
    mp::log_abs_z(64, &m).to_f64()
}

/// Classical elliptic division polynomials for F = x^3 + a2 x^2 + a4 x + a6.
/// Returns (f_n, true) when psi_n = 2y f_n, else (psi_n, false).
pub fn classical_division_g1(f: &QPoly, nmax: usize) -> Vec<(QPoly, bool)> {
    assert_eq!(f.degree(), Some(3));
    let a2 = f.coeff(2);
    let a4 = f.coeff(1);
    let a6 = f.coeff(0);
    let b2 = &a2 * q(4);
    let b4 = &a4 * q(2);
    let b6 = &a6 * q(4);
    let b8 = &a2 * &a6 * q(4) - &a4 * &a4;
    let four_f = f.scale(&q(4));
    type V = (QPoly, bool);
    let mul = |a: &V, b: &V| -> V {
        let p = &a.0 * &b.0;
        match (a.1, b.1) {
            (true, true) => (&p * &four_f, false),
            (x, y) => (p, x ^ y),
        }
    };
    let sub = |a: &V, b: &V| -> V {
        if a.0.is_zero() {
            return (-&b.0, b.1);
        }
        if b.0.is_zero() {
            return a.clone();
        }
        assert_eq!(a.1, b.1, "parity mismatch in recurrence");
        (&a.0 - &b.0, a.1)
    };
    let div2y = |a: &V| -> V {
        if a.1 {
            (a.0.clone(), false)
        } else {
            (a.0.div_exact(&four_f).expect("not divisible by 4F"), true)
        }
    };
    let psi3 = QPoly::new(vec![b8.clone(), &b6 * q(3), &b4 * q(3), b2.clone(), q(3)]);
    let inner = QPoly::new(vec![
        &b4 * &b8 - &b6 * &b6,
        &b2 * &b8 - &b4 * &b6,
        &b8 * q(10),
        &b6 * q(10),
        &b4 * q(5),
        b2.clone(),
        q(2),
    ]);
    let mut psi: Vec<V> = vec![
        (QPoly::zero(), false),
        (QPoly::one(), false),
        (QPoly::one(), true),
        (psi3, false),
        (inner, true),
    ];
    for n in 5..=nmax {
        let m = n / 2;
        let v = if n % 2 == 1 {
            let t1 = mul(&psi[m + 2], &mul(&psi[m], &mul(&psi[m], &psi[m])));
            let t2 = mul(&psi[m - 1], &mul(&psi[m + 1], &mul(&psi[m + 1], &psi[m + 1])));
            sub(&t1, &t2)
        } else {
            let t1 = mul(&psi[m + 2], &mul(&psi[m - 1], &psi[m - 1]));
            let t2 = mul(&psi[m - 2], &mul(&psi[m + 1], &psi[m + 1]));
            div2y(&mul(&sub(&t1, &t2), &psi[m]))
        };
        psi.push(v);
    }
    psi.truncate(nmax + 1);
    psi
}

/// Leading coefficient of psi_n from the Hankel matrix of leading coefficients.
pub fn lc_hankel(f: &QPoly, n: usize) -> Result<Q, CantorError> {
    let g = genus_of(f);
    check_n(n, g)?;
    let (s, k) = parity_start(n, g);
    if k == 0 {
        return Ok(Q::one());
    }
    let t = pj_table(f, s + 2 * k - 2)?;
    let lcs: Vec<Q> = t.p.iter().map(|p| p.lc()).collect();
    let den = rat::lcm_denoms(lcs.iter());
    let rows: Vec<Vec<Z>> = (0..k)
        .map(|r| (0..k).map(|c| (&lcs[s + r + c] * Q::from_integer(den.clone())).to_integer()).collect())
        .collect();
    Ok(Q::new(int_det(rows), num_traits::pow(den, k)))
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qf;

    fn fpoly(c: &[i64]) -> QPoly {
        QPoly::from_ints(c)
    }

    #[test]
    fn e1_examples() {
        let f = fpoly(&[0, 0, 0, 1]);
        let e = e1_polynomial(&f);
        assert_eq!(e.coeff(&[2, 0]), q(-3));
        assert_eq!(e.coeff(&[1, 1]), q(3));
        assert_eq!(e.coeff(&[0, 2]), q(-1));
        let f = fpoly(&[0, -1, 0, 1]);
        let c = e1_coefficients(&f);
        assert_eq!(c[0], fpoly(&[1, 0, -3]));
        assert_eq!(c[0], -&f.derivative());
    }

    #[test]
    fn series_methods_agree() {
        for f in [fpoly(&[0, -1, 0, 1]), fpoly(&[2, 0, 0, 1]), fpoly(&[1, 0, 0, 0, 0, 1]), fpoly(&[1, 2, 0, -1, 0, 3, 0, 1])] {
            let a = series_recursive(&f, 10);
            let b = series_binomial(&f, 10);
            assert_eq!(a, b);
            assert!(a.verify_square(&f));
            assert!(b.verify_square(&f));
            for (j, (_, fp)) in a.coeffs.iter().enumerate() {
                assert!(*fp <= j);
            }
        }
    }

    #[test]
    fn pj_examples() {
        for f in [fpoly(&[0, -1, 0, 1]), fpoly(&[1, 0, 0, 0, 0, 1])] {
            let g = genus_of(&f);
            let t = pj_table(&f, 8).unwrap();
            let sgn = if g % 2 == 0 { Q::one() } else { -Q::one() };
            assert_eq!(t.p[0], QPoly::constant(-&sgn * qf(1, 2)));
            assert_eq!(t.p[1], f.derivative().scale(&sgn));
            for j in 1..=8 {
                assert_eq!(t.p[j].degree(), Some(2 * j * g));
            }
            let t2 = pj_from_series(&f, &series_recursive(&f, 8)).unwrap();
            assert_eq!(t, t2);
            assert_eq!(pj_by_r_recursion(&f, 8), t.p);
        }
        let f = QPoly::new(vec![qf(1, 3), q(0), qf(-1, 2), q(1)]);
        let t = pj_from_series(&f, &series_recursive(&f, 6)).unwrap();
        assert_eq!(pj_table(&f, 6).unwrap(), t);
        assert_eq!(pj_by_r_recursion(&f, 6), t.p);
    }

    #[test]
    fn pj_at_roots() {
        for f in [fpoly(&[0, -1, 0, 1]), fpoly(&[0, -1, 0, 0, 0, 1]), fpoly(&[1, 0, 0, 0, 0, 1])] {
            let g = genus_of(&f);
            let t = pj_table(&f, 12).unwrap();
            let c = SuperellipticCurve::new(2, f.coeffs()).unwrap();
            for a in c.rational_roots() {
                let fp = f.derivative().eval(&a);
                for j in 1..=12 {
                    let sgn = if g % 2 == 0 { Q::one() } else { -Q::one() };
                    let expect = sgn * Q::from_integer(catalan(j - 1)) * num_traits::pow(fp.clone(), j);
                    assert_eq!(t.p[j].eval(&a), expect);
                }
            }
        }
    }

    #[test]
    fn small_psi() {
        let f = fpoly(&[5, 7, 0, 1]);
        let p2 = division_polynomial_with(&f, 2, Engine::Bareiss).unwrap();
        assert_eq!(p2.psi, QPoly::one());
        let p3 = division_polynomial_with(&f, 3, Engine::Bareiss).unwrap();
        assert_eq!(p3.psi, fpoly(&[-49, 60, 42, 0, 3]));
        let p5 = division_polynomial_with(&f, 5, Engine::Bareiss).unwrap();
        assert_eq!(p5.degree(), 12);
        assert!(p5.check_invariants());
    }

    #[test]
    fn engines_agree() {
        for f in [fpoly(&[0, -1, 0, 1]), fpoly(&[1, 0, 0, 0, 0, 1])] {
            for n in 2..12 {
                let a = division_polynomial_with(&f, n, Engine::Bareiss).unwrap();
                let b = division_polynomial_with(&f, n, Engine::Modular).unwrap();
                assert_eq!(a, b, "n={n}");
                assert!(a.check_invariants(), "n={n}");
                let beta = qf(3, 7);
                assert_eq!(psi_value(&f, n, &beta).unwrap(), a.psi.eval(&beta));
            }
        }
    }

    #[test]
    fn rational_curve_values() {
        let f = QPoly::new(vec![qf(1, 3), q(0), qf(-1, 2), q(1)]);
        for n in 1..8 {
            let a = division_polynomial_with(&f, n, Engine::Bareiss).unwrap();
            assert!(a.check_invariants());
            assert_eq!(psi_value(&f, n, &qf(2, 5)).unwrap(), a.psi.eval(&qf(2, 5)));
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(b_closed(3, 1), q(3));
        assert_eq!(b_closed(2, 1), q(1));
        assert_eq!(b0_closed(3, 1), q(1));
        for g in 1..4 {
            for n in g..16 {
                assert_eq!(Q::from_integer(b0_hankel(n, g)), b0_closed(n, g), "g={g} n={n}");
                if !same_parity(n, g) {
                    assert_eq!(b_closed(n, g), b0_closed(n, g));
                }
            }
        }
    }

    #[test]
    fn catalan_identity() {
        let c = catalan_table(6);
        assert_eq!(c[..4], [Z::from(1), Z::from(1), Z::from(2), Z::from(5)]);
        for m in 0..6 {
            let s: Z = (0..=m).map(|i| &c[i] * &c[m - i]).sum();
            assert_eq!(s, c[m + 1]);
        }
        assert_eq!(catalan_hankel(1, 4).unwrap().0, Z::from(1));
        assert_eq!(catalan_hankel(2, 1).unwrap(), (Z::from(2), q(2)));
        assert_eq!(catalan_hankel(3, 2).unwrap(), (Z::from(14), q(14)));
    }

    #[test]
    fn branch_identity() {
        let f = fpoly(&[0, -1, 0, 1]);
        let r = eval_at_branch(&f, &q(1), 3).unwrap();
        assert_eq!((r.lhs.clone(), r.equal), (q(16), true));
        let r = eval_at_branch(&f, &q(0), 4).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, b0_closed(4, 1) * b0_closed(4, 1));
        assert_eq!(eval_at_branch(&f, &q(2), 3), Err(CantorError::NotARoot));
        let r = eval_at_branch(&f, &q(1), 1).unwrap();
        assert_eq!(r.lhs, q(1));
    }

    #[test]
    fn t_sets() {
        assert!(t_set_contains(0, 2, 7));
        assert!(!t_set_contains(5, 2, 5));
        assert!(t_set_contains(7, 2, 5));
    }

    #[test]
    fn classical_agreement() {
        let f = fpoly(&[3, -2, 1, 1]);
        let cl = classical_division_g1(&f, 12);
        for n in 2..=12 {
            let c = division_polynomial_with(&f, n, Engine::Bareiss).unwrap();
            let (p, has_y) = &cl[n];
            assert_eq!(*has_y, n % 2 == 0);
            assert!(c.psi == *p || c.psi == -p, "n={n}");
        }
    }
}
