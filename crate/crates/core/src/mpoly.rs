//! Sparse multivariate polynomials over Q.

use crate::rat::Q;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exps: Vec<u32>, c: Q) -> Self {
        let mut p = Self::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, s: &Q) -> MPoly {
        if s.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut r = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut r = MPoly::one(self.nvars);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Substitute polynomials (all in the same ring) for each variable.
    pub fn substitute(&self, vals: &[MPoly]) -> MPoly {
        assert_eq!(vals.len(), self.nvars);
        let n = vals.first().map(|v| v.nvars).unwrap_or(0);
        let mut cache: Vec<Vec<MPoly>> = vals.iter().map(|v| vec![MPoly::one(n), v.clone()]).collect();
        let mut r = MPoly::zero(n);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(n, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().mul(&vals[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][k as usize]);
            }
            r = r.add(&t);
        }
        r
    }

    /// Weighted degree of every term, if all agree.
    pub fn weighted_degree(&self, w: &[usize]) -> Option<usize> {
        let mut d = None;
        for e in self.terms.keys() {
            let x: usize = e.iter().zip(w).map(|(a, b)| *a as usize * b).sum();
            match d {
                None => d = Some(x),
                Some(y) if y != x => return None,
                _ => {}
            }
        }
        d
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Lexicographically largest exponent vector (x_1 > x_2 > ...).
    pub fn leading(&self) -> Option<(&Vec<u32>, &Q)> {
        self.terms.iter().next_back()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn ring_ops() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let s = x.add(&y);
        let sq = s.pow(2);
        assert_eq!(sq.coeff(&[1, 1]), q(2));
        assert_eq!(sq.sub(&x.pow(2)).sub(&y.pow(2)).sub(&x.mul(&y).scale(&q(2))), MPoly::zero(2));
        let t = MPoly::var(1, 0);
        let sub = sq.substitute(&[t.clone(), t.clone()]);
        assert_eq!(sub, MPoly::monomial(vec![2], q(4)));
        assert_eq!(sq.weighted_degree(&[1, 1]), Some(2));
    }
}
