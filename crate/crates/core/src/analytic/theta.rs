//! Riemann theta with half-integer characteristics and directional derivatives.
//!
//! Terms are enumerated inside an ellipsoid around the dominant index
//! (Fincke–Pohst on the Cholesky factor of Im tau), so every retained term is
//! within 2^-wp of the largest one tail included.

use super::linalg::*;
use crate::mp;
use rug::{Complex, Float};

/// delta' = a/2, delta'' = b/2 with a_i, b_i in {0, 1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Characteristic {
    pub a: Vec<u8>,
    pub b: Vec<u8>,
}

impl Characteristic {
    pub fn is_odd(&self) -> bool {
        self.a.iter().zip(&self.b).map(|(x, y)| (x * y) as u32).sum::<u32>() % 2 == 1
    }

    pub fn all(g: usize) -> Vec<Characteristic> {
        (0..1u32 << (2 * g))
            .map(|m| Characteristic {
                a: (0..g).map(|i| ((m >> i) & 1) as u8).collect(),
                b: (0..g).map(|i| ((m >> (g + i)) & 1) as u8).collect(),
            })
            .collect()
    }

    pub fn odd(g: usize) -> Vec<Characteristic> {
        Self::all(g).into_iter().filter(|c| c.is_odd()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Theta {
    pub g: usize,
    pub wp: u32,
    tau: CMat,
    y_inv: RMat,
    y_f64: Vec<Vec<f64>>,
    /// upper triangular with Y = R^T R
    r_f64: Vec<Vec<f64>>,
}

impl Theta {
    pub fn new(tau: &CMat, y_inv: &RMat) -> Option<Self> {
        let g = tau.len();
        let wp = tau[0][0].prec().0;
        let y_f64 = to_f64(&imag_part(tau));
        let l = cholesky_f64(&y_f64)?;
        let r_f64 = (0..g).map(|i| (0..g).map(|j| l[j][i]).collect()).collect();
        Some(Theta { g, wp, tau: tau.clone(), y_inv: y_inv.clone(), y_f64, r_f64 })
    }

    /// exp(-pi Im(u)^T Y^-1 Im(u)), the factor making |theta| lattice invariant.
    pub fn gauss_factor(&self, u: &[Complex]) -> Float {
        let wp = self.wp;
        let im: Vec<Float> = u.iter().map(|x| x.imag().clone()).collect();
        let mut q = Float::new(wp);
        for i in 0..self.g {
            for j in 0..self.g {
                q += Float::with_val(wp, &self.y_inv[i][j] * &im[i]) * &im[j];
            }
        }
        Float::with_val(wp, -q * mp::pi(wp)).exp()
    }

    fn lattice_points(&self, center: &[f64], r2: f64) -> Vec<Vec<i64>> {
        let g = self.g;
        let mut out = Vec::new();
        let mut x = vec![0i64; g];
        self.enumerate(g as isize - 1, center, r2, &mut x, &mut out);
        out
    }

    fn enumerate(&self, i: isize, center: &[f64], rem: f64, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i < 0 {
            out.push(x.clone());
            return;
        }
        let i = i as usize;
        let r = &self.r_f64;
        // row i of R applied to (x - center): r_ii (x_i - c_i) + sum_{j>i} r_ij (x_j - c_j)
        let mut shift = 0.0;
        for j in i + 1..self.g {
            shift += r[i][j] * (x[j] as f64 - center[j]);
        }
        let mid = center[i] - shift / r[i][i];
        let half = rem.max(0.0).sqrt() / r[i][i];
        let lo = (mid - half).ceil() as i64;
        let hi = (mid + half).floor() as i64;
        for n in lo..=hi {
            let t = r[i][i] * (n as f64 - center[i]) + shift;
            let left = rem - t * t;
            if left < 0.0 {
                continue;
            }
            x[i] = n;
            self.enumerate(i as isize - 1, center, left, x, out);
        }
    }

    /// sum_v prod_k (2 pi i v.d_k) exp(pi i v^T tau v + 2 pi i v^T (u + delta'')) over v in delta' + Z^g.
    pub fn eval(&self, u: &[Complex], ch: &Characteristic, dirs: &[Vec<Complex>]) -> Complex {
        let g = self.g;
        let wp = self.wp;
        let im_u: Vec<f64> = u.iter().map(|x| x.imag().to_f64()).collect();
        // c = Y^-1 Im u; dominant v near -c
        let c: Vec<f64> = (0..g)
            .map(|i| (0..g).map(|j| self.y_inv[i][j].to_f64() * im_u[j]).sum())
            .collect();
        let center: Vec<f64> = (0..g).map(|i| -c[i] - ch.a[i] as f64 / 2.0).collect();
        let dmax = dirs
            .iter()
            .flat_map(|d| d.iter().map(mp::cabs_f64))
            .fold(0.0, f64::max);
        let lmin = min_eigen(&self.y_f64);
        let mut r2 = (wp as f64 * std::f64::consts::LN_2 + 24.0 + 2.0 * g as f64) / std::f64::consts::PI;
        if !dirs.is_empty() {
            let reach = (r2 / lmin).sqrt() + c.iter().map(|x| x.abs()).fold(0.0, f64::max) + 1.0;
            r2 += dirs.len() as f64 * (1.0 + 2.0 * std::f64::consts::PI * reach * dmax * g as f64).ln() / std::f64::consts::PI;
        }
        let pts = self.lattice_points(&center, r2);
        let pi = mp::pi(wp);
        let two_pi_i = Complex::with_val(wp, (0, Float::with_val(wp, 2 * &pi)));
        let pi_i = Complex::with_val(wp, (0, pi.clone()));
        let shifted: Vec<Complex> = (0..g)
            .map(|i| Complex::with_val(wp, &u[i] + Float::with_val(wp, ch.b[i] as u32) / 2u32))
            .collect();
        let mut sum = Complex::new(wp);
        for n in pts {
            let v: Vec<Float> = (0..g)
                .map(|i| Float::with_val(wp, 2 * n[i] + ch.a[i] as i64) / 2u32)
                .collect();
            let mut quad = Complex::new(wp);
            for i in 0..g {
                let mut row = Complex::new(wp);
                for j in 0..g {
                    row += Complex::with_val(wp, &self.tau[i][j] * &v[j]);
                }
                quad += row * &v[i];
            }
            let mut lin = Complex::new(wp);
            for i in 0..g {
                lin += Complex::with_val(wp, &shifted[i] * &v[i]);
            }
            let e = Complex::with_val(wp, &pi_i * &quad) + Complex::with_val(wp, &two_pi_i * &lin);
            let mut t = e.exp();
            for d in dirs {
                let mut s = Complex::new(wp);
                for i in 0..g {
                    s += Complex::with_val(wp, &d[i] * &v[i]);
                }
                t *= Complex::with_val(wp, &two_pi_i * &s);
            }
            sum += t;
        }
        sum
    }

    /// |eval(u)| times the Gauss factor; invariant under u -> u + m + tau n
    /// (for derivatives, on the zero set of the lower-order terms).
    pub fn normalized_abs(&self, u: &[Complex], ch: &Characteristic, dirs: &[Vec<Complex>]) -> Float {
        let v = self.eval(u, ch, dirs);
        Float::with_val(self.wp, mp::cabs(&v) * self.gauss_factor(u))
    }
}

fn min_eigen(a: &[Vec<f64>]) -> f64 {
    // power iteration on the inverse through Cholesky solves
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    let l = cholesky_f64(a).expect("positive definite");
    let solve = |b: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k][i] * x[k];
            }
            x[i] = s / l[i][i];
        }
        x
    };
    let mut v = vec![1.0; n];
    let mut lam = 1.0;
    for _ in 0..100 {
        let w = solve(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        lam = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = w.iter().map(|x| x / norm).collect();
    }
    1.0 / lam
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: u32, a: f64, b: f64) -> Complex {
        Complex::with_val(p, (a, b))
    }

    #[test]
    fn jacobi_triple_product_identity() {
        // |theta[1/2,1/2]'(0)| = pi |theta00 theta01 theta10| at tau = i
        let p = 160;
        let tau = vec![vec![c(p, 0.0, 1.0)]];
        let y_inv = vec![vec![Float::with_val(p, 1)]];
        let th = Theta::new(&tau, &y_inv).unwrap();
        let z = vec![c(p, 0.0, 0.0)];
        let val = |a: u8, b: u8| th.eval(&z, &Characteristic { a: vec![a], b: vec![b] }, &[]);
        let d = th.eval(&z, &Characteristic { a: vec![1], b: vec![1] }, &[vec![c(p, 1.0, 0.0)]]);
        let rhs = Complex::with_val(p, val(0, 0) * val(0, 1)) * val(1, 0) * mp::pi(p);
        let s = Float::with_val(p, mp::cabs(&d) - mp::cabs(&rhs));
        assert!(s.to_f64().abs() < 1e-40, "{}", s.to_f64());
        assert!(mp::cabs_f64(&val(1, 1)) < 1e-45);
    }

    #[test]
    fn quasi_periodicity_of_norm() {
        let p = 128;
        let tau = vec![vec![c(p, 0.3, 1.1), c(p, 0.2, 0.4)], vec![c(p, 0.2, 0.4), c(p, -0.1, 0.9)]];
        let y = imag_part(&tau);
        let y_inv = spd_inverse(&y).unwrap();
        let th = Theta::new(&tau, &y_inv).unwrap();
        let ch = Characteristic { a: vec![1, 0], b: vec![1, 1] };
        let u = vec![c(p, 0.17, -0.05), c(p, -0.3, 0.21)];
        let base = th.normalized_abs(&u, &ch, &[]).to_f64();
        let shifted: Vec<Complex> = (0..2)
            .map(|i| Complex::with_val(p, &u[i] + Complex::with_val(p, &tau[i][1] * 2)) + 1)
            .collect();
        let moved = th.normalized_abs(&shifted, &ch, &[]).to_f64();
        assert!((base - moved).abs() < 1e-25 * base.max(1.0));
        assert_eq!(Characteristic::odd(2).len(), 6);
        assert_eq!(Characteristic::odd(1), vec![Characteristic { a: vec![1], b: vec![1] }]);
    }
}
