//! Superelliptic curves y^N = f(x): validation, gap sequences, branch data.

use crate::mp::{self, RootError};
use crate::poly::{self, QPoly};
use crate::rat::{self, ParseError, Q};
use num_integer::Integer;
use num_traits::{One, Zero};
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("empty coefficient list")]
    Empty,
    #[error("f is not monic")]
    NotMonic,
    #[error("f is not separable (discriminant 0)")]
    NotSeparable,
    #[error("bad degree pair (N, m) = ({0}, {1}): need m > N > 1 and gcd(m, N) = 1")]
    BadDegreePair(u32, usize),
    #[error("branch index collision")]
    IndexCollision,
    #[error("operation needs a hyperelliptic curve (N = 2)")]
    NotHyperelliptic,
    #[error("branch index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("malformed curve file: {0}")]
    Format(String),
    #[error(transparent)]
    Roots(#[from] RootError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SuperellipticCurve {
    n: u32,
    f: QPoly,
    m: usize,
    g: usize,
}

impl SuperellipticCurve {
    pub fn new(n: u32, coeffs: &[Q]) -> Result<Self, CurveError> {
        if coeffs.is_empty() {
            return Err(CurveError::Empty);
        }
        if !coeffs.last().unwrap().is_one() {
            return Err(CurveError::NotMonic);
        }
        let f = QPoly::new(coeffs.to_vec());
        let m = f.degree().unwrap();
        if n < 2 || m <= n as usize || m.gcd(&(n as usize)) != 1 {
            return Err(CurveError::BadDegreePair(n, m));
        }
        if poly::discriminant(&f).is_zero() {
            return Err(CurveError::NotSeparable);
        }
        let g = (n as usize - 1) * (m - 1) / 2;
        Ok(SuperellipticCurve { n, f, m, g })
    }

    pub fn hyperelliptic(coeffs: &[i64]) -> Result<Self, CurveError> {
        Self::new(2, &coeffs.iter().map(|&c| rat::q(c)).collect::<Vec<_>>())
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn f(&self) -> &QPoly {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn is_hyperelliptic(&self) -> bool {
        self.n == 2
    }

    pub fn require_hyperelliptic(&self) -> Result<(), CurveError> {
        if self.n == 2 {
            Ok(())
        } else {
            Err(CurveError::NotHyperelliptic)
        }
    }

    pub fn is_integral(&self) -> bool {
        self.f.coeffs().iter().all(|a| a.is_integer())
    }

    /// Rational roots of f.
    pub fn rational_roots(&self) -> Vec<Q> {
        let (zf, _) = self.f.to_zpoly_scaled();
        let a0 = zf.coeffs().iter().find(|a| !a.is_zero()).cloned().unwrap();
        let lc = zf.lc();
        let mut cands = vec![Q::zero()];
        for p in divisors(&a0) {
            for q in divisors(&lc) {
                let r = Q::new(p.clone(), q.clone());
                cands.push(r.clone());
                cands.push(-r);
            }
        }
        cands.sort();
        cands.dedup();
        cands.into_iter().filter(|r| self.f.eval(r).is_zero()).collect()
    }

    pub fn to_file(&self) -> CurveFile {
        CurveFile {
            n: self.n,
            f: self.f.coeffs().iter().map(rat::fmt_rational).collect(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, CurveError> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| CurveError::Format(e.to_string()))?;
        let n = v
            .get("N")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| CurveError::Format("missing integer field N".into()))?;
        let arr = v
            .get("f")
            .and_then(|x| x.as_array())
            .ok_or_else(|| CurveError::Format("missing array field f".into()))?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for c in arr {
            let r = match c {
                serde_json::Value::String(s) => rat::parse_rational(s)?,
                serde_json::Value::Number(x) => rat::parse_rational(&x.to_string())?,
                _ => return Err(CurveError::Format("coefficients must be strings or numbers".into())),
            };
            coeffs.push(r);
        }
        Self::new(n as u32, &coeffs)
    }

    /// Stable hex digest of (N, f), used as a cache key.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.n.to_le_bytes());
        for a in self.f.coeffs() {
            h.update(rat::fmt_rational(a).as_bytes());
            h.update(b",");
        }
        h.finalize().iter().take(16).map(|b| format!("{b:02x}")).collect()
    }
}

fn divisors(n: &rat::Z) -> Vec<rat::Z> {
    use num_traits::Signed;
    let n = n.abs();
    let mut out = Vec::new();
    let (ps, rest) = rat::small_prime_factors(&n, 100_000);
    if !rest.is_one() {
        // large cofactor: fall back to the trivial divisors only
        return vec![rat::Z::one(), n];
    }
    out.push(rat::Z::one());
    for p in ps {
        let pz = rat::Z::from(p);
        let e = rat::ord_int(&n, p);
        let cur = out.clone();
        let mut pk = rat::Z::one();
        for _ in 0..e {
            pk *= &pz;
            out.extend(cur.iter().map(|d| d * &pk));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CurveFile {
    #[serde(rename = "N")]
    pub n: u32,
    pub f: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapSequence {
    pub gaps: Vec<usize>,
    pub partition: Vec<usize>,
}

impl GapSequence {
    pub fn weight(&self) -> usize {
        self.gaps.iter().enumerate().map(|(k, w)| w - k).sum()
    }
}

pub fn gap_sequence(n: u32, m: usize) -> Result<GapSequence, CurveError> {
    let nn = n as usize;
    if n < 2 || m <= nn || m.gcd(&nn) != 1 {
        return Err(CurveError::BadDegreePair(n, m));
    }
    let mut gaps = Vec::new();
    for beta in 1..nn {
        let top = beta * m;
        // alpha >= 1 with beta*m - alpha*N > 0
        let mut alpha = 1;
        while alpha * nn < top {
            gaps.push(top - alpha * nn);
            alpha += 1;
        }
    }
    gaps.sort_unstable();
    gaps.dedup();
    let g = gaps.len();
    let partition = (1..=g).map(|k| gaps[g - k] + k - g).collect();
    Ok(GapSequence { gaps, partition })
}

/// Conjugate (transpose) of a partition.
pub fn conjugate_partition(p: &[usize]) -> Vec<usize> {
    let mx = p.first().copied().unwrap_or(0);
    (1..=mx).map(|i| p.iter().filter(|&&x| x >= i).count()).collect()
}

/// (disc f, Delta); Delta = 2^{4g} disc f only in the hyperelliptic case.
pub fn discriminant(c: &SuperellipticCurve) -> (Q, Option<Q>) {
    let d = poly::discriminant(c.f());
    let delta = c
        .is_hyperelliptic()
        .then(|| &d * Q::from_integer(num_traits::pow(rat::Z::from(2), 4 * c.genus())));
    (d, delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Finite(usize),
    Infinity,
}

/// Finite branch values of a hyperelliptic curve at working precision.
#[derive(Clone, Debug)]
pub struct BranchData {
    pub prec: u32,
    pub alphas: Vec<Complex>,
    pub fprime: Vec<Complex>,
    pub fprime_poly: QPoly,
    pub genus: usize,
    pub min_separation: f64,
}

impl BranchData {
    pub fn new(c: &SuperellipticCurve, prec: u32) -> Result<Self, CurveError> {
        c.require_hyperelliptic()?;
        let alphas = mp::roots(c.f(), prec)?;
        let fp = c.f().derivative();
        let fprime = alphas.iter().map(|a| mp::eval_q(&fp, a)).collect();
        let mut sep = f64::INFINITY;
        for i in 0..alphas.len() {
            for j in i + 1..alphas.len() {
                sep = sep.min(mp::cabs_f64(&Complex::with_val(prec, &alphas[i] - &alphas[j])));
            }
        }
        Ok(BranchData { prec, alphas, fprime, fprime_poly: fp, genus: c.genus(), min_separation: sep })
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Index of the branch value equal to a rational root.
    pub fn index_of(&self, r: &Q) -> Option<usize> {
        let rf = mp::cq(self.prec, r);
        self.alphas
            .iter()
            .position(|a| mp::cabs_f64(&Complex::with_val(self.prec, a - &rf)) < 1e-20)
    }

    /// prod f'(alpha_i), which equals +-disc f for monic f.
    pub fn fprime_product(&self) -> Complex {
        let mut p = mp::cone(self.prec);
        for v in &self.fprime {
            p *= v;
        }
        p
    }

    /// prod_{i<j} (alpha_i - alpha_j)^2.
    pub fn root_product_discriminant(&self) -> Complex {
        let mut p = mp::cone(self.prec);
        for i in 0..self.alphas.len() {
            for j in i + 1..self.alphas.len() {
                let d = Complex::with_val(self.prec, &self.alphas[i] - &self.alphas[j]);
                p *= Complex::with_val(self.prec, d.square_ref());
            }
        }
        p
    }
}

/// |l_{ijk}|: twisted ratio of branch-point differences.
pub fn symmetric_root_modulus(b: &BranchData, i: Branch, j: Branch, k: Branch) -> Result<Float, CurveError> {
    if i == j || j == k || i == k {
        return Err(CurveError::IndexCollision);
    }
    let prec = b.prec;
    let e = 2 * b.genus as u32;
    let fin = |x: Branch| -> Result<usize, CurveError> {
        match x {
            Branch::Finite(t) if t < b.len() => Ok(t),
            Branch::Finite(t) => Err(CurveError::BadIndex(t)),
            Branch::Infinity => Err(CurveError::IndexCollision),
        }
    };
    let dist = |a: usize, c: usize| mp::cabs(&Complex::with_val(prec, &b.alphas[a] - &b.alphas[c]));
    let fpa = |a: usize| mp::cabs(&b.fprime[a]);
    match (i, j, k) {
        (Branch::Infinity, _, _) => Err(CurveError::IndexCollision),
        (_, Branch::Infinity, _) => {
            let (i, k) = (fin(i)?, fin(k)?);
            let r = Float::with_val(prec, mp::nth_root(&fpa(i), e).recip_ref());
            Ok(Float::with_val(prec, dist(i, k) * r))
        }
        (_, _, Branch::Infinity) => {
            let (i, j) = (fin(i)?, fin(j)?);
            Ok(mp::nth_root(&Float::with_val(prec, fpa(j) / fpa(i)), e))
        }
        _ => {
            let (i, j, k) = (fin(i)?, fin(j)?, fin(k)?);
            let ratio = Float::with_val(prec, dist(i, k) / dist(j, k));
            let tw = mp::nth_root(&Float::with_val(prec, fpa(j) / fpa(i)), e);
            Ok(Float::with_val(prec, ratio * tw))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    fn gaps_oracle(n: usize, m: usize) -> Vec<usize> {
        // numbers not in the semigroup generated by N and m
        let bound = (n - 1) * (m - 1);
        (1..bound).filter(|&w| !(0..=w / m).any(|b| (w - b * m) % n == 0)).collect()
    }

    #[test]
    fn construction() {
        let c = SuperellipticCurve::hyperelliptic(&[0, -1, 0, 1]).unwrap();
        assert_eq!((c.degree(), c.genus()), (3, 1));
        assert_eq!(SuperellipticCurve::hyperelliptic(&[1, 0, 0, 0, 0, 1]).unwrap().genus(), 2);
        assert_eq!(SuperellipticCurve::hyperelliptic(&[0, 0, 1, 1]), Err(CurveError::NotSeparable));
        assert_eq!(SuperellipticCurve::hyperelliptic(&[0, 0, 1, 2]), Err(CurveError::NotMonic));
        assert_eq!(SuperellipticCurve::hyperelliptic(&[1, 0, 0, 1, 1]), Err(CurveError::BadDegreePair(2, 4)));
        assert_eq!(SuperellipticCurve::new(3, &[q(1), q(0), q(1)]), Err(CurveError::BadDegreePair(3, 2)));
        let c = SuperellipticCurve::from_json(r#"{"N": 3, "f": ["1/2", "0", "0", "0", "1"]}"#).unwrap();
        assert_eq!(c.genus(), 3);
    }

    #[test]
    fn gaps_match_semigroup_complement() {
        for n in 2..7usize {
            for m in n + 1..14 {
                if m.gcd(&n) != 1 {
                    continue;
                }
                let gs = gap_sequence(n as u32, m).unwrap();
                let g = (n - 1) * (m - 1) / 2;
                if g > 8 {
                    continue;
                }
                assert_eq!(gs.gaps, gaps_oracle(n, m));
                assert_eq!(gs.gaps.len(), g);
                assert_eq!(gs.gaps[0], 1);
                assert_eq!(*gs.gaps.last().unwrap(), 2 * g - 1);
                assert_eq!(24 * gs.weight(), (n * n - 1) * (m * m - 1));
                assert_eq!(conjugate_partition(&gs.partition), gs.partition);
            }
        }
        assert_eq!(gap_sequence(2, 5).unwrap().partition, vec![2, 1]);
        assert_eq!(gap_sequence(3, 4).unwrap().gaps, vec![1, 2, 5]);
    }

    #[test]
    fn discriminant_values() {
        let c = SuperellipticCurve::hyperelliptic(&[0, -1, 0, 1]).unwrap();
        assert_eq!(discriminant(&c), (q(4), Some(q(64))));
        let c = SuperellipticCurve::hyperelliptic(&[1, 0, 0, 1]).unwrap();
        assert_eq!(discriminant(&c).0, q(-27));
    }

    #[test]
    fn branch_data_matches_discriminant() {
        for f in [vec![0, -1, 0, 1], vec![2, 0, 0, 1], vec![1, 0, 0, 0, 0, 1], vec![0, -1, 0, 0, 0, 1], vec![3, -2, 1, 0, 5, 1]] {
            let c = SuperellipticCurve::hyperelliptic(&f).unwrap();
            let b = BranchData::new(&c, 256).unwrap();
            let d = mp::fq(256, &discriminant(&c).0);
            let rp = b.root_product_discriminant();
            let rel = mp::cabs_f64(&Complex::with_val(256, &rp - &d)) / d.to_f64().abs();
            assert!(rel < 1e-38, "{f:?} {rel}");
            let fp = mp::cabs(&b.fprime_product()).to_f64();
            assert!((fp - d.to_f64().abs()).abs() < 1e-30 * fp);
        }
    }

    #[test]
    fn symmetric_roots() {
        let c = SuperellipticCurve::hyperelliptic(&[0, -1, 0, 1]).unwrap();
        let b = BranchData::new(&c, 128).unwrap();
        let (m1, z0, p1) = (b.index_of(&q(-1)).unwrap(), b.index_of(&q(0)).unwrap(), b.index_of(&q(1)).unwrap());
        use Branch::*;
        let l = symmetric_root_modulus(&b, Finite(p1), Infinity, Finite(z0)).unwrap().to_f64();
        assert!((l - 0.5f64.sqrt()).abs() < 1e-15);
        let l2 = symmetric_root_modulus(&b, Finite(p1), Infinity, Finite(m1)).unwrap().to_f64();
        assert!((l2 - 2.0 * 0.5f64.sqrt()).abs() < 1e-15);
        let l = symmetric_root_modulus(&b, Finite(p1), Finite(m1), Finite(z0)).unwrap().to_f64();
        assert!((l - 1.0).abs() < 1e-15);
        assert_eq!(symmetric_root_modulus(&b, Finite(0), Finite(0), Infinity), Err(CurveError::IndexCollision));
        let c = SuperellipticCurve::hyperelliptic(&[3, -2, 1, 0, 5, 1]).unwrap();
        let b = BranchData::new(&c, 128).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let a = symmetric_root_modulus(&b, Finite(i), Finite(j), Finite(k)).unwrap();
                    let bb = symmetric_root_modulus(&b, Finite(j), Finite(i), Finite(k)).unwrap();
                    assert!((a * bb - 1.0f64).abs().to_f64() < 1e-30);
                }
            }
        }
    }

    #[test]
    fn rational_roots_found() {
        let c = SuperellipticCurve::hyperelliptic(&[0, -1, 0, 0, 0, 1]).unwrap();
        assert_eq!(c.rational_roots(), vec![q(-1), q(0), q(1)]);
        assert!(SuperellipticCurve::hyperelliptic(&[2, 0, 0, 1]).unwrap().rational_roots().is_empty());
    }
}
