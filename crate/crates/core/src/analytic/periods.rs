//! Period matrices of (omega_i) and (eta_i) on a canonical symplectic basis.
//!
//! Cycles are loops around the edges of a Euclidean minimum spanning tree on
//! the finite branch values. Their intersection matrix is read off the
//! bilinear relation G = P^T H - H^T P = 2 pi i K and reduced to the standard
//! form by integer congruence.

use super::linalg::*;
use super::AnalyticError;
use crate::curve::{BranchData, SuperellipticCurve};
use crate::format;
use crate::mp;
use crate::poly::QPoly;
use crate::rat::{q, Q};
use num_traits::Zero;
use rug::{Complex, Float};

/// omega_i = x^{i-1} dx / 2y and eta_i = (1/2y) sum_j (j+1-i) a_{2g-i-j} x^j dx.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialBases {
    pub g: usize,
    pub omega: Vec<QPoly>,
    pub eta: Vec<QPoly>,
}

pub fn differential_bases(c: &SuperellipticCurve) -> Result<DifferentialBases, AnalyticError> {
    c.require_hyperelliptic().map_err(|_| AnalyticError::NotHyperelliptic)?;
    let g = c.genus();
    let f = c.f();
    // a_k is the coefficient of x^{2g+1-k}
    let a = |k: usize| f.coeff(2 * g + 1 - k);
    let omega = (0..g)
        .map(|i| {
            let mut v = vec![Q::zero(); i + 1];
            v[i] = q(1);
            QPoly::new(v)
        })
        .collect();
    let eta = (1..=g)
        .map(|i| {
            let mut v = vec![Q::zero(); 2 * g + 1];
            for j in i..=(2 * g - i) {
                v[j] += q((j + 1 - i) as i64) * a(2 * g - i - j);
            }
            QPoly::new(v)
        })
        .collect();
    Ok(DifferentialBases { g, omega, eta })
}

impl DifferentialBases {
    /// Laurent coefficient of s^k in p(x) dx / 2y at o, where x = s^-2 and
    /// y = s^{-(2g+1)} sqrt(s^{4g+2} f(s^-2)). The parameter s agrees with
    /// x^g / y up to a unit.
    pub fn laurent_at_infinity(f: &QPoly, p: &QPoly, k: i64) -> Q {
        // p(x)dx/2y = -p(s^-2) s^{2g-2} S(s)^{-1} ds with S^2 = s^{4g+2} f(s^-2)
        let m = f.degree().unwrap();
        let g = (m - 1) / 2;
        // S^2 as a polynomial in s^2: sum_j f_{m-j} s^{2j}
        let depth = (p.degree().unwrap_or(0) + 2).max(2) + (k.unsigned_abs() as usize);
        let s2: Vec<Q> = (0..=depth).map(|j| if j <= m { f.coeff(m - j) } else { Q::zero() }).collect();
        // S^{-1} = (1 + w)^{-1/2} in s^2
        let mut inv = vec![Q::zero(); depth + 1];
        let mut wpow = vec![Q::zero(); depth + 1];
        wpow[0] = q(1);
        let w: Vec<Q> = s2.iter().enumerate().map(|(i, c)| if i == 0 { Q::zero() } else { c.clone() }).collect();
        for n in 0..=depth {
            // C(-1/2, n) = (-1)^n binom(2n, n) / 4^n
            let coef = Q::new(crate::rat::binomial(2 * n as i64, n as i64), num_traits::pow(crate::rat::Z::from(4u32), n))
                * if n % 2 == 0 { q(1) } else { q(-1) };
            for i in 0..=depth {
                inv[i] += &coef * &wpow[i];
            }
            let mut next = vec![Q::zero(); depth + 1];
            for i in 0..=depth {
                if wpow[i].is_zero() {
                    continue;
                }
                for j in 1..=depth - i {
                    next[i + j] += &wpow[i] * &w[j];
                }
            }
            wpow = next;
        }
        // exponent of s: -2d + 2g - 2 + 2i for terms p_d, inv_i
        let mut out = Q::zero();
        for (d, pd) in p.coeffs().iter().enumerate() {
            for (i, c) in inv.iter().enumerate() {
                let e = -2 * d as i64 + 2 * g as i64 - 2 + 2 * i as i64;
                if e == k {
                    out -= pd * c;
                }
            }
        }
        out
    }

    /// Residue of eta_i at o.
    pub fn eta_residue(&self, f: &QPoly, i: usize) -> Q {
        Self::laurent_at_infinity(f, &self.eta[i], -1)
    }

    /// Order of vanishing of omega_i at o in the local parameter.
    pub fn omega_order_at_infinity(&self, i: usize) -> usize {
        2 * self.g - 2 * (i + 1)
    }
}

#[derive(Clone, Debug)]
pub struct PeriodMatrices {
    pub g: usize,
    pub precision: u32,
    /// working precision of all stored values
    pub wp: u32,
    pub f: QPoly,
    pub alphas: Vec<Complex>,
    pub omega1: CMat,
    pub omega2: CMat,
    pub eta1: CMat,
    pub eta2: CMat,
    pub tau: CMat,
    pub omega1_inv: CMat,
    /// Im(tau)^{-1}
    pub y_inv: RMat,
    pub legendre_c: Complex,
    pub symmetry_residual: f64,
    pub legendre_residual: f64,
    pub min_separation: f64,
    pub quadrature_nodes: usize,
}

fn mst(alphas: &[(f64, f64)]) -> Vec<(usize, usize)> {
    let n = alphas.len();
    let d = |a: usize, b: usize| ((alphas[a].0 - alphas[b].0).powi(2) + (alphas[a].1 - alphas[b].1).powi(2)).sqrt();
    let mut in_tree = vec![false; n];
    in_tree[0] = true;
    let mut edges = Vec::new();
    for _ in 1..n {
        let mut best = (f64::INFINITY, 0, 0);
        for a in (0..n).filter(|&a| in_tree[a]) {
            for b in (0..n).filter(|&b| !in_tree[b]) {
                if d(a, b) < best.0 {
                    best = (d(a, b), a, b);
                }
            }
        }
        in_tree[best.2] = true;
        edges.push((best.1, best.2));
    }
    edges
}

/// Integrals of p_k(x) dx / y over the loop around [alpha_a, alpha_b],
/// x = c + r cos(theta), by the midpoint rule in theta (spectral here).
fn edge_integrals(alphas: &[Complex], a: usize, b: usize, polys: &[Vec<Complex>], n: usize, wp: u32) -> Vec<Complex> {
    let c = Complex::with_val(wp, &alphas[a] + &alphas[b]) / 2u32;
    let r = Complex::with_val(wp, &alphas[b] - &alphas[a]) / 2u32;
    let others: Vec<(Complex, Complex, Complex)> = alphas
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != a && *j != b)
        .map(|(_, al)| {
            let d = Complex::with_val(wp, &c - al);
            (al.clone(), d.clone().sqrt(), d.recip())
        })
        .collect();
    let pi = mp::pi(wp);
    let mut acc = vec![Complex::new(wp); polys.len()];
    for m in 0..n {
        let th = Float::with_val(wp, (2 * m + 1) as u32 * Float::with_val(wp, &pi / (2 * n) as u32));
        let x = Complex::with_val(wp, &c + Complex::with_val(wp, &r * th.cos()));
        let mut h = Complex::with_val(wp, 1);
        for (al, sq, inv) in &others {
            let ratio = Complex::with_val(wp, Complex::with_val(wp, &x - al) * inv);
            h *= sq;
            h *= ratio.sqrt();
        }
        let ih = h.recip();
        for (k, p) in polys.iter().enumerate() {
            acc[k] += Complex::with_val(wp, mp::eval_c(p, &x) * &ih);
        }
    }
    let scale = Complex::with_val(wp, (0, Float::with_val(wp, &pi / n as u32)));
    acc.into_iter().map(|v| v * &scale).collect()
}

fn converged_edge(alphas: &[Complex], a: usize, b: usize, polys: &[Vec<Complex>], wp: u32) -> Result<(Vec<Complex>, usize), AnalyticError> {
    let tol = Float::with_val(wp, Float::i_exp(1, -(wp as i32) + 24));
    let mut n = 32;
    let mut prev = edge_integrals(alphas, a, b, polys, n, wp);
    loop {
        n *= 2;
        let cur = edge_integrals(alphas, a, b, polys, n, wp);
        let mut worst = Float::new(wp);
        let mut size = Float::with_val(wp, 1);
        for (x, y) in cur.iter().zip(&prev) {
            let d = mp::cabs(&Complex::with_val(wp, x - y));
            if d > worst {
                worst = d;
            }
            let s = mp::cabs(x);
            if s > size {
                size = s;
            }
        }
        if worst <= Float::with_val(wp, &tol * &size) {
            return Ok((cur, n));
        }
        if n > 1 << 15 {
            return Err(AnalyticError::PrecisionLoss(format!("edge ({a},{b}) quadrature did not converge")));
        }
        prev = cur;
    }
}

/// Bring an antisymmetric unimodular integer matrix to the standard
/// symplectic form. Rows of the result are new basis vectors (e_1..e_g, f_1..f_g).
pub fn symplectic_basis(k: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = k.len();
    let form = |u: &[i64], w: &[i64]| -> i64 {
        let mut s = 0;
        for i in 0..n {
            for j in 0..n {
                s += u[i] * k[i][j] * w[j];
            }
        }
        s
    };
    let mut rem: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while !rem.is_empty() {
        let e = rem.remove(0);
        loop {
            let mut nz: Vec<(i64, usize)> = rem
                .iter()
                .enumerate()
                .filter(|(_, w)| form(&e, w) != 0)
                .map(|(i, w)| (form(&e, w).abs(), i))
                .collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort();
            let piv = rem[nz[0].1].clone();
            let pv = form(&e, &piv);
            for &(_, idx) in &nz[1..] {
                let qq = form(&e, &rem[idx]).div_euclid(pv);
                for t in 0..n {
                    rem[idx][t] -= qq * piv[t];
                }
            }
        }
        let idx = rem.iter().position(|w| form(&e, w) != 0)?;
        let mut f = rem.remove(idx);
        let d = form(&e, &f);
        if d.abs() != 1 {
            return None;
        }
        if d < 0 {
            f.iter_mut().for_each(|x| *x = -*x);
        }
        rem = rem
            .into_iter()
            .map(|w| {
                let b = form(&e, &w);
                let a = -form(&f, &w);
                (0..n).map(|t| w[t] - a * e[t] - b * f[t]).collect()
            })
            .collect();
        es.push(e);
        fs.push(f);
    }
    es.extend(fs);
    Some(es)
}

struct CycleData {
    /// rows: cycles, columns: forms
    p: CMat,
    h: CMat,
}

fn split(d: &CycleData, g: usize) -> (CMat, CMat, CMat, CMat) {
    let wp = d.p[0][0].prec().0;
    let mut w1 = czeros(wp, g, g);
    let mut w2 = czeros(wp, g, g);
    let mut e1 = czeros(wp, g, g);
    let mut e2 = czeros(wp, g, g);
    for j in 0..g {
        for i in 0..g {
            w1[i][j] = d.p[j][i].clone();
            w2[i][j] = d.p[g + j][i].clone();
            e1[i][j] = d.h[j][i].clone();
            e2[i][j] = d.h[g + j][i].clone();
        }
    }
    (w1, w2, e1, e2)
}

/// Siegel-type reduction: returns an integer symplectic M (2g x 2g) acting on
/// period columns, P' = P M.
fn siegel_reduction(w1: &CMat, w2: &CMat) -> Vec<Vec<i64>> {
    let g = w1.len();
    let n = 2 * g;
    let ident = |n: usize| -> Vec<Vec<i64>> { (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect() };
    let mut total = ident(n);
    let mut p: CMat = (0..g).map(|i| w1[i].iter().chain(w2[i].iter()).cloned().collect()).collect();
    let matmul = |a: &[Vec<i64>], b: &[Vec<i64>]| -> Vec<Vec<i64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    };
    for _ in 0..64 {
        let tau_of = |p: &CMat| -> Option<CMat> {
            let a: CMat = p.iter().map(|r| r[..g].to_vec()).collect();
            let b: CMat = p.iter().map(|r| r[g..].to_vec()).collect();
            Some(cmul(&cinv(&a)?, &b))
        };
        let Some(tau) = tau_of(&p) else { break };
        let y = to_f64(&imag_part(&tau));
        let v = lll_gram(&y);
        let vt_inv: Vec<Vec<i64>> = {
            let vi = int_inverse(&v);
            (0..g).map(|i| (0..g).map(|j| vi[j][i]).collect()).collect()
        };
        let mut m1 = vec![vec![0i64; n]; n];
        for i in 0..g {
            for j in 0..g {
                m1[i][j] = vt_inv[i][j];
                m1[g + i][g + j] = v[i][j];
            }
        }
        p = cmul_int(&p, &m1);
        total = matmul(&total, &m1);
        let tau = tau_of(&p).unwrap();
        let mut m2 = ident(n);
        for i in 0..g {
            for j in 0..g {
                let re = tau[i][j].real().to_f64();
                m2[i][g + j] = -(re.round() as i64);
            }
        }
        // keep S symmetric
        for i in 0..g {
            for j in 0..i {
                m2[i][g + j] = m2[j][g + i];
            }
        }
        p = cmul_int(&p, &m2);
        total = matmul(&total, &m2);
        let tau = tau_of(&p).unwrap();
        let t11 = mp::cabs_f64(&tau[0][0]);
        if t11 >= 1.0 - 1e-12 {
            break;
        }
        let mut m3 = ident(n);
        m3[0][0] = 0;
        m3[g][g] = 0;
        m3[g][0] = 1;
        m3[0][g] = -1;
        p = cmul_int(&p, &m3);
        total = matmul(&total, &m3);
    }
    total
}

pub fn periods(c: &SuperellipticCurve, precision: u32) -> Result<PeriodMatrices, AnalyticError> {
    periods_with(c, precision, true)
}

pub fn periods_with(c: &SuperellipticCurve, precision: u32, reduce: bool) -> Result<PeriodMatrices, AnalyticError> {
    c.require_hyperelliptic().map_err(|_| AnalyticError::NotHyperelliptic)?;
    let g = c.genus();
    let wp = precision + 48;
    let bd = BranchData::new(c, wp).map_err(|e| AnalyticError::BranchCollision(e.to_string()))?;
    let alphas = bd.alphas.clone();
    let coords: Vec<(f64, f64)> = alphas.iter().map(mp::to_c64).collect();
    let edges = mst(&coords);
    let bases = differential_bases(c)?;
    let polys: Vec<Vec<Complex>> = bases
        .omega
        .iter()
        .chain(bases.eta.iter())
        .map(|p| p.coeffs().iter().map(|a| mp::cq(wp, a)).collect())
        .collect();
    let mut p = Vec::new();
    let mut h = Vec::new();
    let mut nodes = 0;
    for &(a, b) in &edges {
        let (v, n) = converged_edge(&alphas, a, b, &polys, wp)?;
        nodes += n;
        p.push(v[..g].to_vec());
        h.push(v[g..].to_vec());
    }
    let n = 2 * g;
    let two_pi_i = Complex::with_val(wp, (0, Float::with_val(wp, 2 * mp::pi(wp))));
    let mut k = vec![vec![0i64; n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut s = Complex::new(wp);
            for i in 0..g {
                s += Complex::with_val(wp, &p[a][i] * &h[b][i]);
                s -= Complex::with_val(wp, &h[a][i] * &p[b][i]);
            }
            let kk = Complex::with_val(wp, s / &two_pi_i);
            let (re, im) = mp::to_c64(&kk);
            let r = re.round();
            if (re - r).abs() > 1e-8 || im.abs() > 1e-8 {
                return Err(AnalyticError::PrecisionLoss(format!("intersection entry {re}+{im}i not integral")));
            }
            k[a][b] = r as i64;
        }
    }
    let t = symplectic_basis(&k)
        .ok_or_else(|| AnalyticError::PrecisionLoss("cycle intersection matrix is not unimodular".into()))?;
    let mut data = CycleData { p: czeros(wp, n, g), h: czeros(wp, n, g) };
    for r in 0..n {
        for i in 0..g {
            for s in 0..n {
                if t[r][s] != 0 {
                    data.p[r][i] += Complex::with_val(wp, &p[s][i] * t[r][s]);
                    data.h[r][i] += Complex::with_val(wp, &h[s][i] * t[r][s]);
                }
            }
        }
    }
    let (mut w1, mut w2, mut e1, mut e2) = split(&data, g);
    if reduce {
        let m = siegel_reduction(&w1, &w2);
        let pw: CMat = (0..g).map(|i| w1[i].iter().chain(w2[i].iter()).cloned().collect()).collect();
        let pe: CMat = (0..g).map(|i| e1[i].iter().chain(e2[i].iter()).cloned().collect()).collect();
        let pw = cmul_int(&pw, &m);
        let pe = cmul_int(&pe, &m);
        w1 = pw.iter().map(|r| r[..g].to_vec()).collect();
        w2 = pw.iter().map(|r| r[g..].to_vec()).collect();
        e1 = pe.iter().map(|r| r[..g].to_vec()).collect();
        e2 = pe.iter().map(|r| r[g..].to_vec()).collect();
    }
    let w1_inv = cinv(&w1).ok_or_else(|| AnalyticError::PrecisionLoss("singular A-period matrix".into()))?;
    let tau = cmul(&w1_inv, &w2);
    let mut sym = 0f64;
    for i in 0..g {
        for j in 0..g {
            sym = sym.max(mp::cabs_f64(&Complex::with_val(wp, &tau[i][j] - &tau[j][i])));
        }
    }
    let y = imag_part(&tau);
    let y_sym: RMat = (0..g)
        .map(|i| (0..g).map(|j| Float::with_val(wp, &y[i][j] + &y[j][i]) / 2u32).collect())
        .collect();
    let y_inv = spd_inverse(&y_sym).ok_or_else(|| AnalyticError::PrecisionLoss("Im tau is not positive definite".into()))?;
    // M J M^T = c J
    let a = csub(&cmul(&w1, &ctranspose(&e2)), &cmul(&w2, &ctranspose(&e1)));
    let b = csub(&cmul(&w1, &ctranspose(&w2)), &cmul(&w2, &ctranspose(&w1)));
    let d = csub(&cmul(&e1, &ctranspose(&e2)), &cmul(&e2, &ctranspose(&e1)));
    let lc = a[0][0].clone();
    let mut leg = 0f64;
    for i in 0..g {
        for j in 0..g {
            let target = if i == j { lc.clone() } else { Complex::new(wp) };
            leg = leg.max(mp::cabs_f64(&Complex::with_val(wp, &a[i][j] - &target)));
            leg = leg.max(mp::cabs_f64(&b[i][j]));
            leg = leg.max(mp::cabs_f64(&d[i][j]));
        }
    }
    let tol = 10f64.powf(-0.2 * precision as f64).max(1e-300);
    if sym > tol {
        return Err(AnalyticError::PrecisionLoss(format!("tau symmetry residual {sym:e}")));
    }
    if leg > tol {
        return Err(AnalyticError::PrecisionLoss(format!("Legendre residual {leg:e}")));
    }
    Ok(PeriodMatrices {
        g,
        precision,
        wp,
        f: c.f().clone(),
        alphas,
        omega1: w1,
        omega2: w2,
        eta1: e1,
        eta2: e2,
        tau,
        omega1_inv: w1_inv,
        y_inv,
        legendre_c: lc,
        symmetry_residual: sym,
        legendre_residual: leg,
        min_separation: bd.min_separation,
        quadrature_nodes: nodes,
    })
}

impl PeriodMatrices {
    /// Matrices as [re, im] decimal string pairs at the requested precision.
    pub fn to_json(&self) -> serde_json::Value {
        let digits = mp::digits_for(self.precision);
        let c = |z: &Complex| [format::float(z.real(), digits), format::float(z.imag(), digits)];
        let m = |a: &CMat| a.iter().map(|r| r.iter().map(c).collect::<Vec<_>>()).collect::<Vec<_>>();
        serde_json::json!({
            "format_version": 1,
            "g": self.g,
            "precision": self.precision,
            "omega1": m(&self.omega1),
            "omega2": m(&self.omega2),
            "eta1": m(&self.eta1),
            "eta2": m(&self.eta2),
            "tau": m(&self.tau),
            "legendre_c": c(&self.legendre_c),
            "symmetry_residual": format::f64(self.symmetry_residual),
            "legendre_residual": format::f64(self.legendre_residual),
            "legendre_modulus_error": format::f64(self.legendre_modulus_error()),
            "quadrature_nodes": self.quadrature_nodes,
        })
    }

    /// |c| - 2 pi for the Legendre scalar.
    pub fn legendre_modulus_error(&self) -> f64 {
        let m = mp::cabs(&self.legendre_c);
        Float::with_val(self.wp, m - 2 * mp::pi(self.wp)).to_f64().abs()
    }

    pub fn lattice_vector(&self, n1: &[i64], n2: &[i64]) -> Vec<Complex> {
        let g = self.g;
        (0..g)
            .map(|i| {
                let mut s = Complex::new(self.wp);
                for j in 0..g {
                    s += Complex::with_val(self.wp, &self.omega1[i][j] * n1[j]);
                    s += Complex::with_val(self.wp, &self.omega2[i][j] * n2[j]);
                }
                s
            })
            .collect()
    }

    /// u = omega1^{-1} z.
    pub fn normalize(&self, z: &[Complex]) -> Vec<Complex> {
        cmul_vec(&self.omega1_inv, z)
    }

    /// Real coordinates (z', z'') with z = omega1 z' + omega2 z''.
    pub fn real_coordinates(&self, z: &[Complex]) -> (Vec<Float>, Vec<Float>) {
        let u = self.normalize(z);
        let g = self.g;
        // u = z' + tau z''  =>  z'' = Y^{-1} Im u, z' = Re u - Re(tau) z''
        let im: Vec<Float> = u.iter().map(|x| x.imag().clone()).collect();
        let zpp: Vec<Float> = (0..g)
            .map(|i| {
                let mut s = Float::new(self.wp);
                for j in 0..g {
                    s += Float::with_val(self.wp, &self.y_inv[i][j] * &im[j]);
                }
                s
            })
            .collect();
        let zp: Vec<Float> = (0..g)
            .map(|i| {
                let mut s = u[i].real().clone();
                for j in 0..g {
                    s -= Float::with_val(self.wp, self.tau[i][j].real() * &zpp[j]);
                }
                s
            })
            .collect();
        (zp, zpp)
    }

    /// Signed distance of a vector from the lattice, in normalized coordinates.
    pub fn lattice_residual(&self, z: &[Complex]) -> f64 {
        let (zp, zpp) = self.real_coordinates(z);
        zp.iter()
            .chain(zpp.iter())
            .map(|x| Float::with_val(self.wp, x - x.clone().round()).to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn im_tau_f64(&self) -> Vec<Vec<f64>> {
        to_f64(&imag_part(&self.tau))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(c: &[i64]) -> SuperellipticCurve {
        SuperellipticCurve::hyperelliptic(c).unwrap()
    }

    #[test]
    fn bases_examples() {
        let c = curve(&[0, -1, 0, 1]);
        let b = differential_bases(&c).unwrap();
        assert_eq!(b.eta[0], QPoly::from_ints(&[0, 1]));
        let c = curve(&[3, 1, 4, 1, 5, 1]);
        let b = differential_bases(&c).unwrap();
        // top term of eta_i is (2g - 2i + 1) x^{2g-i}
        assert_eq!(b.eta[0].degree(), Some(3));
        assert_eq!(b.eta[0].lc(), q(3));
        assert_eq!(b.eta[1].degree(), Some(2));
        assert_eq!(b.eta[1].lc(), q(1));
        for i in 0..2 {
            assert!(b.eta_residue(c.f(), i).is_zero());
        }
        assert_eq!(b.omega_order_at_infinity(0), 2);
        // eta_1 expands as -s^{-2} + ..., exercised via the coefficient
        assert_eq!(DifferentialBases::laurent_at_infinity(c.f(), &b.omega[0], 2), q(-1));
    }

    #[test]
    fn symplectic_reduction() {
        let k = vec![vec![0, 1, -1, 0], vec![-1, 0, 0, 0], vec![1, 0, 0, -1], vec![0, 0, 1, 0]];
        let t = symplectic_basis(&k).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0;
                for a in 0..4 {
                    for b in 0..4 {
                        s += t[i][a] * k[a][b] * t[j][b];
                    }
                }
                let expect = if j == i + 2 { 1 } else if i == j + 2 { -1 } else { 0 };
                assert_eq!(s, expect);
            }
        }
        assert!(symplectic_basis(&[vec![0, 2], vec![-2, 0]]).is_none());
    }

    #[test]
    fn lemniscatic_tau() {
        let pm = periods(&curve(&[0, -1, 0, 1]), 128).unwrap();
        let t = &pm.tau[0][0];
        assert!(t.real().to_f64().abs() < 1e-30);
        assert!((t.imag().to_f64() - 1.0).abs() < 1e-30);
        assert!(pm.legendre_modulus_error() < 1e-30);
        let (re, im) = mp::to_c64(&pm.legendre_c);
        assert!(re.abs() < 1e-20 && (im - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        // loop period of dx/2y = pi / agm(sqrt(e1 - e3), sqrt(e1 - e2))
        let (mut a, mut b) = (2f64.sqrt(), 1f64);
        for _ in 0..10 {
            (a, b) = ((a + b) / 2.0, (a * b).sqrt());
        }
        let w = mp::cabs_f64(&pm.omega1[0][0]);
        assert!((w - std::f64::consts::PI / a).abs() < 1e-12, "{w}");
    }

    #[test]
    fn genus_two_invariants() {
        for c in [curve(&[1, 0, 0, 0, 0, 1]), curve(&[0, -1, 0, 0, 0, 1])] {
            let pm = periods(&c, 128).unwrap();
            assert!(pm.symmetry_residual < 1e-30);
            assert!(pm.legendre_modulus_error() < 1e-30);
            let y = pm.im_tau_f64();
            assert!(cholesky_f64(&y).is_some());
            // Siegel reduced: |tau_11| >= 1 and |Re tau| <= 1/2
            assert!(mp::cabs_f64(&pm.tau[0][0]) >= 1.0 - 1e-9);
            for r in &pm.tau {
                for x in r {
                    assert!(x.real().to_f64().abs() <= 0.5 + 1e-9);
                }
            }
        }
    }
}
