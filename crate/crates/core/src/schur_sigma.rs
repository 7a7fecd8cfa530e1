//! Schur polynomials of the gap partition and the weighted polynomial σ_{N,m}
//! with s_π = σ(p_{w_1}, ..., p_{w_g}), where p_r = (1/r) Σ x_i^r.

use crate::curve::{gap_sequence, CurveError};
use crate::mpoly::MPoly;
use crate::poly::QPoly;
use crate::rat::{self, q, Q};
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchurError {
    #[error("invalid partition {0:?}")]
    BadPartition(Vec<usize>),
    #[error("linear system for sigma has no solution")]
    NoSolution,
    #[error("linear system for sigma has {0} free parameters")]
    NonUniqueSolution(usize),
    #[error("expression is not symmetric")]
    NotSymmetric,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Basis {
    /// variables e_1..e_g
    Elementary,
    /// variables p_1..p_k with the 1/r normalization
    PowerSum,
    /// variables x_1..x_g
    Monomial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricPolynomial {
    pub g: usize,
    pub basis: Basis,
    pub poly: MPoly,
}

impl SymmetricPolynomial {
    pub fn to_monomial(&self) -> SymmetricPolynomial {
        let poly = match self.basis {
            Basis::Monomial => self.poly.clone(),
            Basis::Elementary => self.poly.substitute(&elementary_in_x(self.g)),
            Basis::PowerSum => {
                let vals: Vec<MPoly> = (1..=self.poly.nvars()).map(|r| power_sum_in_x(r, self.g)).collect();
                self.poly.substitute(&vals)
            }
        };
        SymmetricPolynomial { g: self.g, basis: Basis::Monomial, poly }
    }

    pub fn to_elementary(&self) -> Result<SymmetricPolynomial, SchurError> {
        let poly = match self.basis {
            Basis::Elementary => self.poly.clone(),
            Basis::Monomial => monomial_to_e(self.g, &self.poly)?,
            Basis::PowerSum => {
                let vals: Vec<MPoly> = (1..=self.poly.nvars()).map(|r| power_sum_in_e(r, self.g)).collect();
                self.poly.substitute(&vals)
            }
        };
        Ok(SymmetricPolynomial { g: self.g, basis: Basis::Elementary, poly })
    }
}

/// e_1..e_g as polynomials in x_1..x_g.
pub fn elementary_in_x(g: usize) -> Vec<MPoly> {
    let mut out = Vec::with_capacity(g);
    for k in 1..=g {
        let mut p = MPoly::zero(g);
        for mask in 0u32..(1 << g) {
            if mask.count_ones() as usize == k {
                let e: Vec<u32> = (0..g).map(|i| (mask >> i) & 1).collect();
                p.add_term(e, Q::one());
            }
        }
        out.push(p);
    }
    out
}

/// p_r = (1/r) Σ x_i^r in x_1..x_g.
pub fn power_sum_in_x(r: usize, g: usize) -> MPoly {
    let mut p = MPoly::zero(g);
    for i in 0..g {
        let mut e = vec![0; g];
        e[i] = r as u32;
        p.add_term(e, rat::qf(1, r as i64));
    }
    p
}

/// Complete homogeneous h_k in x_1..x_g.
pub fn complete_in_x(k: usize, g: usize) -> MPoly {
    let mut p = MPoly::zero(g);
    let mut e = vec![0u32; g];
    fn rec(i: usize, left: u32, e: &mut Vec<u32>, p: &mut MPoly) {
        if i + 1 == e.len() {
            e[i] = left;
            p.add_term(e.clone(), Q::one());
            return;
        }
        for a in 0..=left {
            e[i] = a;
            rec(i + 1, left - a, e, p);
        }
    }
    if g == 0 {
        return if k == 0 { MPoly::one(0) } else { MPoly::zero(0) };
    }
    rec(0, k as u32, &mut e, &mut p);
    p
}

/// Unnormalized power sums P_1..P_rmax in the e-basis via Newton's identities.
fn newton_sums_in_e(rmax: usize, g: usize) -> Vec<MPoly> {
    let e = |i: usize| MPoly::var(g, i - 1);
    let mut ps: Vec<MPoly> = vec![MPoly::zero(g)];
    for r in 1..=rmax {
        let mut acc = MPoly::zero(g);
        for i in 1..r.min(g + 1) {
            let sign = if (i - 1) % 2 == 0 { Q::one() } else { -Q::one() };
            acc = acc.add(&e(i).mul(&ps[r - i]).scale(&sign));
        }
        if r <= g {
            let sign = if (r - 1) % 2 == 0 { q(r as i64) } else { q(-(r as i64)) };
            acc = acc.add(&e(r).scale(&sign));
        }
        ps.push(acc);
    }
    ps
}

/// p_r = (1/r) Σ x_i^r expressed in e_1..e_g.
pub fn power_sum_in_e(r: usize, g: usize) -> MPoly {
    newton_sums_in_e(r, g)[r].scale(&rat::qf(1, r as i64))
}

/// Rewrite a symmetric polynomial in x_1..x_g over the e-basis.
pub fn monomial_to_e(g: usize, p: &MPoly) -> Result<MPoly, SchurError> {
    let ex = elementary_in_x(g);
    let mut rest = p.clone();
    let mut out = MPoly::zero(g);
    let mut guard = 0usize;
    while let Some((lead, c)) = rest.leading() {
        let lead = lead.clone();
        let c = c.clone();
        if lead.windows(2).any(|w| w[0] < w[1]) {
            return Err(SchurError::NotSymmetric);
        }
        let mut em = vec![0u32; g];
        for i in 0..g {
            em[i] = lead[i] - if i + 1 < g { lead[i + 1] } else { 0 };
        }
        let mut t = MPoly::constant(g, c.clone());
        for (i, &k) in em.iter().enumerate() {
            t = t.mul(&ex[i].pow(k));
        }
        rest = rest.sub(&t);
        out.add_term(em, c);
        guard += 1;
        if guard > 1_000_000 {
            return Err(SchurError::NotSymmetric);
        }
    }
    Ok(out)
}

fn check_partition(p: &[usize], g: usize) -> Result<(), SchurError> {
    if p.len() > g || p.contains(&0) || p.windows(2).any(|w| w[0] < w[1]) {
        return Err(SchurError::BadPartition(p.to_vec()));
    }
    Ok(())
}

fn det(m: &[Vec<MPoly>], nvars: usize) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::one(nvars);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MPoly::zero(nvars);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let t = m[0][j].mul(&det(&minor, nvars));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

/// s_π = det(e_{π_i - i + j}) over the e-basis (e_0 = 1, e_k = 0 outside 0..=g).
pub fn schur_polynomial(partition: &[usize], g: usize) -> Result<SymmetricPolynomial, SchurError> {
    check_partition(partition, g)?;
    let l = partition.len();
    let entry = |k: i64| -> MPoly {
        if k == 0 {
            MPoly::one(g)
        } else if k < 0 || k > g as i64 {
            MPoly::zero(g)
        } else {
            MPoly::var(g, k as usize - 1)
        }
    };
    let m: Vec<Vec<MPoly>> = (0..l)
        .map(|i| (0..l).map(|j| entry(partition[i] as i64 - i as i64 + j as i64)).collect())
        .collect();
    Ok(SymmetricPolynomial { g, basis: Basis::Elementary, poly: det(&m, g) })
}

/// s_λ = det(h_{λ_i - i + j}) directly in x_1..x_g (independent route).
pub fn schur_via_complete(partition: &[usize], g: usize) -> Result<MPoly, SchurError> {
    check_partition(partition, g)?;
    let l = partition.len();
    let m: Vec<Vec<MPoly>> = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    let k = partition[i] as i64 - i as i64 + j as i64;
                    if k < 0 {
                        MPoly::zero(g)
                    } else {
                        complete_in_x(k as usize, g)
                    }
                })
                .collect()
        })
        .collect();
    Ok(det(&m, g))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSigmaPolynomial {
    pub g: usize,
    pub weights: Vec<usize>,
    pub poly: MPoly,
    pub total_weight: usize,
}

#[derive(Serialize)]
struct TermJson {
    exps: Vec<u32>,
    coeff: String,
}

#[derive(Serialize)]
struct SigmaJson {
    weights: Vec<usize>,
    terms: Vec<TermJson>,
}

impl WeightedSigmaPolynomial {
    pub fn to_json(&self) -> serde_json::Value {
        let s = SigmaJson {
            weights: self.weights.clone(),
            terms: self
                .poly
                .terms()
                .iter()
                .map(|(e, c)| TermJson { exps: e.clone(), coeff: rat::fmt_rational(c) })
                .collect(),
        };
        serde_json::to_value(s).unwrap()
    }

    /// σ(p_{w_1}, ..., p_{w_g}) expanded in x_1..x_g.
    pub fn substitute_power_sums_x(&self) -> MPoly {
        let vals: Vec<MPoly> = self.weights.iter().map(|&w| power_sum_in_x(w, self.g)).collect();
        self.poly.substitute(&vals)
    }
}

fn weighted_compositions(w: &[usize], total: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; w.len()];
    fn rec(i: usize, left: usize, w: &[usize], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == w.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left / w[i] {
            cur[i] = k as u32;
            rec(i + 1, left - k * w[i], w, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, total, w, &mut cur, &mut out);
    out
}

/// Solve A c = b over Q; columns are unknowns. Returns the unique solution.
fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Result<Vec<Q>, SchurError> {
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        b.swap(r, p);
        let inv = Q::one() / &a[r][c];
        for j in c..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[r];
                b[i] -= t;
            }
        }
        piv_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return Err(SchurError::NoSolution);
    }
    if piv_cols.len() < cols {
        return Err(SchurError::NonUniqueSolution(cols - piv_cols.len()));
    }
    let mut x = vec![Q::zero(); cols];
    for (i, &c) in piv_cols.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Ok(x)
}

pub fn sigma_polynomial(n: u32, m: usize) -> Result<WeightedSigmaPolynomial, SchurError> {
    let gs = gap_sequence(n, m)?;
    let g = gs.gaps.len();
    let total = gs.weight();
    let s = schur_polynomial(&gs.partition, g)?.poly;
    let maxw = *gs.gaps.last().unwrap();
    let sums = newton_sums_in_e(maxw, g);
    let pw: Vec<MPoly> = gs.gaps.iter().map(|&w| sums[w].scale(&rat::qf(1, w as i64))).collect();
    let monos = weighted_compositions(&gs.gaps, total);
    let images: Vec<MPoly> = monos
        .iter()
        .map(|e| {
            let mut t = MPoly::one(g);
            for (i, &k) in e.iter().enumerate() {
                t = t.mul(&pw[i].pow(k));
            }
            t
        })
        .collect();
    let mut keys: Vec<Vec<u32>> = s.terms().keys().cloned().collect();
    for im in &images {
        keys.extend(im.terms().keys().cloned());
    }
    keys.sort();
    keys.dedup();
    let a: Vec<Vec<Q>> = keys.iter().map(|k| images.iter().map(|im| im.coeff(k)).collect()).collect();
    let b: Vec<Q> = keys.iter().map(|k| s.coeff(k)).collect();
    let sol = solve_exact(a, b)?;
    let mut poly = MPoly::zero(g);
    for (e, c) in monos.into_iter().zip(sol) {
        poly.add_term(e, c);
    }
    Ok(WeightedSigmaPolynomial { g, weights: gs.gaps, poly, total_weight: total })
}

/// a(u) = σ(u/w_1, ..., u/w_g).
pub fn a_polynomial(s: &WeightedSigmaPolynomial) -> QPoly {
    let deg = s.poly.total_degree().unwrap_or(0) as usize;
    let mut c = vec![Q::zero(); deg + 1];
    for (e, coef) in s.poly.terms() {
        let mut t = coef.clone();
        let mut d = 0usize;
        for (k, &w) in e.iter().zip(&s.weights) {
            t /= num_traits::pow(q(w as i64), *k as usize);
            d += *k as usize;
        }
        c[d] += t;
    }
    QPoly::new(c)
}

/// Parity of a(u): Some(+1) if even, Some(-1) if odd, None if mixed.
pub fn a_parity(a: &QPoly) -> Option<i32> {
    let ev = a.coeffs().iter().enumerate().any(|(i, c)| i % 2 == 0 && !c.is_zero());
    let od = a.coeffs().iter().enumerate().any(|(i, c)| i % 2 == 1 && !c.is_zero());
    match (ev, od) {
        (true, true) => None,
        (false, _) => Some(-1),
        (true, false) => Some(1),
    }
}

/// All (N, m) with m > N > 1, gcd 1 and genus at most `gmax`.
pub fn degree_pairs(gmax: usize) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    for n in 2..(2 * gmax as u32 + 2) {
        for m in (n as usize + 1)..(2 * gmax + 3) {
            if num_integer::gcd(m, n as usize) == 1 && (n as usize - 1) * (m - 1) / 2 <= gmax {
                out.push((n, m));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn schur_examples() {
        let s = schur_polynomial(&[1], 1).unwrap();
        assert_eq!(s.poly, MPoly::var(1, 0));
        let s = schur_polynomial(&[2, 1], 2).unwrap();
        assert_eq!(s.poly, MPoly::var(2, 0).mul(&MPoly::var(2, 1)));
        let s = schur_polynomial(&[1, 1], 2).unwrap();
        let expect = MPoly::var(2, 0).pow(2).sub(&MPoly::var(2, 1));
        assert_eq!(s.poly, expect);
        let x = s.to_monomial().poly;
        assert_eq!(x.terms().len(), 3);
        assert!(x.terms().values().all(|c| c.is_one()));
        assert!(schur_polynomial(&[1, 2], 2).is_err());
        assert!(schur_polynomial(&[1, 1, 1], 2).is_err());
    }

    #[test]
    fn newton_identities() {
        for g in 1..5 {
            for r in 1..=2 * g + 1 {
                let via_e = SymmetricPolynomial { g, basis: Basis::Elementary, poly: power_sum_in_e(r, g) };
                assert_eq!(via_e.to_monomial().poly, power_sum_in_x(r, g), "g={g} r={r}");
            }
        }
    }

    #[test]
    fn sigma_small_cases() {
        let s = sigma_polynomial(2, 3).unwrap();
        assert_eq!(s.poly, MPoly::var(1, 0));
        assert_eq!(a_polynomial(&s), QPoly::x());
        let s = sigma_polynomial(2, 5).unwrap();
        assert_eq!(s.total_weight, 3);
        assert_eq!(a_polynomial(&s).degree(), Some(3));
        assert_eq!(s.substitute_power_sums_x(), schur_via_complete(&[2, 1], 2).unwrap());
    }

    #[test]
    fn sigma_suite() {
        for (n, m) in degree_pairs(5) {
            let s = sigma_polynomial(n, m).unwrap();
            let expected = ((n * n - 1) as usize * (m * m - 1)) / 24;
            assert_eq!(s.poly.weighted_degree(&s.weights), Some(expected), "({n},{m})");
            let a = a_polynomial(&s);
            assert!(a.coeff(0).is_zero());
            assert!(a_parity(&a).is_some(), "({n},{m})");
            if s.g <= 4 {
                let gs = gap_sequence(n, m).unwrap();
                assert_eq!(s.substitute_power_sums_x(), schur_via_complete(&gs.partition, s.g).unwrap(), "({n},{m})");
            }
        }
    }

    fn arb_poly(g: usize) -> impl Strategy<Value = MPoly> {
        prop::collection::vec((prop::collection::vec(0u32..3, g), -5i64..5), 0..5).prop_map(move |ts| {
            let mut p = MPoly::zero(g);
            for (e, c) in ts {
                p.add_term(e, q(c));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn e_basis_roundtrip(p in arb_poly(3)) {
            let sp = SymmetricPolynomial { g: 3, basis: Basis::Elementary, poly: p.clone() };
            let back = sp.to_monomial().to_elementary().unwrap();
            prop_assert_eq!(back.poly, p);
        }
    }
}
