//! Abel–Jacobi map p -> int_o^p (omega_1, ..., omega_g).
//!
//! For a branch point w_k the integral runs along a ray from alpha_k to
//! infinity (x = alpha_k + e v^2 near the root, x = alpha_k + e / u^2 in the
//! tail). A general point is reached from the best-placed root with
//! x = alpha_k + v^2, so y = v h(x) with h continued by principal square
//! roots of ratios. Images of branch points are half periods, so their sheet
//! is irrelevant modulo the lattice.

use super::periods::PeriodMatrices;
use super::AnalyticError;
use crate::mp;
use rug::{Complex, Float};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub enum PathSource {
    Origin,
    Branch(usize),
    Point { x: Complex, y: Complex, root: usize, detour: bool },
}

#[derive(Clone, Debug)]
pub struct AbelJacobiPoint {
    pub z: Vec<Complex>,
    pub source: PathSource,
    pub pieces: usize,
}

/// Integrate the analytic vector function `f` along [s0, s1], splitting into
/// pieces no longer than half their distance to the nearest singularity.
fn integrate_segment<F>(s0: &Complex, s1: &Complex, sing: &[Complex], dim: usize, wp: u32, f: &F, pieces: &mut usize) -> Result<Vec<Complex>, AnalyticError>
where
    F: Fn(&Complex) -> Vec<Complex>,
{
    let n = (wp as usize / 4 + 8).max(16);
    let rule = mp::gauss_legendre(n, wp);
    let mut stack = vec![(s0.clone(), s1.clone(), 0u32)];
    let mut acc = vec![Complex::new(wp); dim];
    while let Some((a, b, depth)) = stack.pop() {
        let len = mp::cabs_f64(&Complex::with_val(wp, &b - &a));
        let d = sing.iter().map(|s| seg_distance(&a, &b, s)).fold(f64::INFINITY, f64::min);
        if d < 1e-40 || depth > 200 {
            return Err(AnalyticError::PathDegeneracy(format!("singularity at distance {d:e} from path")));
        }
        if len > 0.5 * d {
            let m = Complex::with_val(wp, &a + &b) / 2u32;
            stack.push((m.clone(), b, depth + 1));
            stack.push((a, m, depth + 1));
            continue;
        }
        *pieces += 1;
        let half = Complex::with_val(wp, &b - &a) / 2u32;
        let mid = Complex::with_val(wp, &a + &b) / 2u32;
        for (x, w) in rule.iter() {
            let s = Complex::with_val(wp, &mid + Complex::with_val(wp, &half * x));
            let vals = f(&s);
            let scale = Complex::with_val(wp, &half * w);
            for (k, v) in vals.into_iter().enumerate() {
                acc[k] += v * &scale;
            }
        }
    }
    Ok(acc)
}

fn seg_distance(a: &Complex, b: &Complex, p: &Complex) -> f64 {
    let (ax, ay) = mp::to_c64(a);
    let (bx, by) = mp::to_c64(b);
    let (px, py) = mp::to_c64(p);
    point_segment_distance((ax, ay), (bx, by), (px, py))
}

pub(crate) fn point_segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let l2 = dx * dx + dy * dy;
    let t = if l2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l2).clamp(0.0, 1.0) };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

fn ray_clearance(alphas: &[(f64, f64)], k: usize, phi: f64) -> f64 {
    let (cx, cy) = alphas[k];
    let (ex, ey) = (phi.cos(), phi.sin());
    alphas
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, &(px, py))| {
            let t = ((px - cx) * ex + (py - cy) * ey).max(0.0);
            ((px - cx - t * ex).powi(2) + (py - cy - t * ey).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Continuation of prod_{j != k} sqrt(x - alpha_j) from x = alpha_k.
struct RootProduct {
    data: Vec<(Complex, Complex, Complex)>,
}

impl RootProduct {
    fn new(alphas: &[Complex], k: usize) -> Self {
        let wp = alphas[0].prec().0;
        let data = alphas
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, a)| {
                let d = Complex::with_val(wp, &alphas[k] - a);
                (a.clone(), d.clone().sqrt(), d.recip())
            })
            .collect();
        RootProduct { data }
    }

    fn eval(&self, x: &Complex) -> Complex {
        let wp = x.prec().0;
        let mut h = Complex::with_val(wp, 1);
        for (a, sq, inv) in &self.data {
            let r = Complex::with_val(wp, Complex::with_val(wp, x - a) * inv);
            h *= sq;
            h *= r.sqrt();
        }
        h
    }
}

pub struct AbelJacobi {
    pub pm: Arc<PeriodMatrices>,
    coords: Vec<(f64, f64)>,
    branch_cache: std::sync::Mutex<Vec<Option<Vec<Complex>>>>,
}

impl AbelJacobi {
    pub fn new(pm: Arc<PeriodMatrices>) -> Self {
        let coords = pm.alphas.iter().map(mp::to_c64).collect();
        let n = pm.alphas.len();
        AbelJacobi { pm, coords, branch_cache: std::sync::Mutex::new(vec![None; n]) }
    }

    fn g(&self) -> usize {
        self.pm.g
    }

    /// int from alpha_k to infinity along the clearest of 64 rays.
    pub fn branch(&self, k: usize) -> Result<AbelJacobiPoint, AnalyticError> {
        if let Some(z) = self.branch_cache.lock().unwrap()[k].clone() {
            return Ok(AbelJacobiPoint { z, source: PathSource::Branch(k), pieces: 0 });
        }
        let wp = self.pm.wp;
        let g = self.g();
        let (phi, clear) = (0..64)
            .map(|i| {
                let phi = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / 64.0;
                (phi, ray_clearance(&self.coords, k, phi))
            })
            .fold((0.0, -1.0), |b, x| if x.1 > b.1 { x } else { b });
        if clear < 0.01 * self.pm.min_separation {
            return Err(AnalyticError::PathDegeneracy("no clear ray to infinity".into()));
        }
        let alphas = &self.pm.alphas;
        let ak = &alphas[k];
        let e = Complex::with_val(wp, (Float::with_val(wp, phi).cos(), Float::with_val(wp, phi).sin()));
        let eh = Complex::with_val(wp, (Float::with_val(wp, phi / 2.0).cos(), Float::with_val(wp, phi / 2.0).sin()));
        let h = RootProduct::new(alphas, k);
        let reach = self.coords.iter().map(|&(x, y)| ((x - self.coords[k].0).powi(2) + (y - self.coords[k].1).powi(2)).sqrt()).fold(0.0, f64::max);
        let r_join = 2.0 * reach + 1.0;
        let mut pieces = 0;
        // near part in v, x = alpha_k + e v^2; singular where v^2 = (alpha_j - alpha_k)/e
        let sing_v: Vec<Complex> = alphas
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .flat_map(|(_, a)| {
                let s = Complex::with_val(wp, Complex::with_val(wp, a - ak) / &e).sqrt();
                [s.clone(), -s]
            })
            .collect();
        let near = |v: &Complex| -> Vec<Complex> {
            let x = Complex::with_val(wp, ak + Complex::with_val(wp, &e * Complex::with_val(wp, v.square_ref())));
            let w = Complex::with_val(wp, &eh / h.eval(&x));
            powers(&x, g).into_iter().map(|p| p * &w).collect()
        };
        let v1 = Complex::with_val(wp, r_join.sqrt());
        let a = integrate_segment(&Complex::new(wp), &v1, &sing_v, g, wp, &near, &mut pieces)?;
        // tail in u, x = alpha_k + e / u^2; singular where u^2 = e / (alpha_j - alpha_k)
        let sing_u: Vec<Complex> = alphas
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .flat_map(|(_, a)| {
                let s = Complex::with_val(wp, Complex::with_val(wp, &e / Complex::with_val(wp, a - ak))).sqrt();
                [s.clone(), -s]
            })
            .collect();
        let tail = |u: &Complex| -> Vec<Complex> {
            let u2 = Complex::with_val(wp, u.square_ref());
            let x = Complex::with_val(wp, ak + Complex::with_val(wp, &e / &u2));
            let w = Complex::with_val(wp, -Complex::with_val(wp, &eh / h.eval(&x)) / &u2);
            powers(&x, g).into_iter().map(|p| p * &w).collect()
        };
        let u1 = v1.clone().recip();
        let b = integrate_segment(&Complex::new(wp), &u1, &sing_u, g, wp, &tail, &mut pieces)?;
        let z: Vec<Complex> = a.into_iter().zip(b).map(|(x, y)| Complex::with_val(wp, &y - &x)).collect();
        self.branch_cache.lock().unwrap()[k] = Some(z.clone());
        Ok(AbelJacobiPoint { z, source: PathSource::Branch(k), pieces })
    }

    /// Abel–Jacobi image of (x, y); y must satisfy y^2 = f(x).
    pub fn point(&self, x: &Complex, y: &Complex) -> Result<AbelJacobiPoint, AnalyticError> {
        let wp = self.pm.wp;
        let g = self.g();
        let fx = mp::eval_q(&self.pm.f, x);
        let y2 = Complex::with_val(wp, y.square_ref());
        let scale = 1.0 + mp::cabs_f64(&fx);
        if mp::cabs_f64(&Complex::with_val(wp, &y2 - &fx)) > scale * 2f64.powi(-(self.pm.precision as i32) / 2) {
            return Err(AnalyticError::NotOnCurve);
        }
        let xc = mp::to_c64(x);
        // branch point given directly
        for (k, &c) in self.coords.iter().enumerate() {
            let d = ((c.0 - xc.0).powi(2) + (c.1 - xc.1).powi(2)).sqrt();
            if d == 0.0 || mp::cabs_f64(&Complex::with_val(wp, x - &self.pm.alphas[k])) < 2f64.powi(-(self.pm.precision as i32) + 8) {
                return self.branch(k);
            }
        }
        // root whose segment to x has the largest clearance
        let n = self.coords.len();
        let clearance = |k: usize| -> f64 {
            (0..n)
                .filter(|&j| j != k)
                .map(|j| point_segment_distance(self.coords[k], xc, self.coords[j]))
                .fold(f64::INFINITY, f64::min)
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| clearance(b).partial_cmp(&clearance(a)).unwrap());
        let k = order[0];
        let margin = 0.01 * self.pm.min_separation;
        let mut mids: Vec<Option<(f64, f64)>> = vec![None];
        if clearance(k) < margin {
            mids.clear();
            // deterministic detours through points off the segment
            let (ax, ay) = self.coords[k];
            let (dx, dy) = (xc.0 - ax, xc.1 - ay);
            for s in [0.3, -0.3, 0.6, -0.6, 1.0, -1.0] {
                mids.push(Some((ax + 0.5 * dx - s * dy, ay + 0.5 * dy + s * dx)));
            }
        }
        for mid in mids {
            let ok = match mid {
                None => true,
                Some(m) => {
                    (0..n).filter(|&j| j != k).all(|j| point_segment_distance(self.coords[k], m, self.coords[j]) >= margin)
                        && (0..n).all(|j| point_segment_distance(m, xc, self.coords[j]) >= margin)
                }
            };
            if !ok {
                continue;
            }
            let mut pieces = 0;
            let zpath = self.path_from_root(k, mid, x, y, &mut pieces)?;
            let base = self.branch(k)?;
            let z = (0..g).map(|i| Complex::with_val(wp, &base.z[i] + &zpath[i])).collect();
            return Ok(AbelJacobiPoint {
                z,
                source: PathSource::Point { x: x.clone(), y: y.clone(), root: k, detour: mid.is_some() },
                pieces: pieces + base.pieces,
            });
        }
        Err(AnalyticError::PathDegeneracy("no admissible detour found".into()))
    }

    fn path_from_root(&self, k: usize, mid: Option<(f64, f64)>, x: &Complex, y: &Complex, pieces: &mut usize) -> Result<Vec<Complex>, AnalyticError> {
        let wp = self.pm.wp;
        let g = self.g();
        let alphas = &self.pm.alphas;
        let ak = &alphas[k];
        let h = RootProduct::new(alphas, k);
        let first_end = match mid {
            None => x.clone(),
            Some((mx, my)) => Complex::with_val(wp, (mx, my)),
        };
        let v0 = Complex::with_val(wp, &first_end - ak).sqrt();
        let sing_v: Vec<Complex> = alphas
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .flat_map(|(_, a)| {
                let s = Complex::with_val(wp, a - ak).sqrt();
                [s.clone(), -s]
            })
            .collect();
        let near = |v: &Complex| -> Vec<Complex> {
            let xx = Complex::with_val(wp, ak + Complex::with_val(wp, v.square_ref()));
            let w = h.eval(&xx).recip();
            powers(&xx, g).into_iter().map(|p| p * &w).collect()
        };
        let mut z = integrate_segment(&Complex::new(wp), &v0, &sing_v, g, wp, &near, pieces)?;
        let mut y_end = Complex::with_val(wp, &v0 * h.eval(&first_end));
        if let Some(_) = mid {
            // second leg in x with y continued by principal roots of ratios
            let m = first_end.clone();
            let ym = y_end.clone();
            let data: Vec<(Complex, Complex)> = alphas
                .iter()
                .map(|a| (a.clone(), Complex::with_val(wp, &m - a).recip()))
                .collect();
            let yof = |xx: &Complex| -> Complex {
                let mut r = ym.clone();
                for (a, inv) in &data {
                    r *= Complex::with_val(wp, Complex::with_val(wp, xx - a) * inv).sqrt();
                }
                r
            };
            let leg = |xx: &Complex| -> Vec<Complex> {
                let w = Complex::with_val(wp, yof(xx) * 2u32).recip();
                powers(xx, g).into_iter().map(|p| p * &w).collect()
            };
            let add = integrate_segment(&m, x, alphas, g, wp, &leg, pieces)?;
            for i in 0..g {
                z[i] += &add[i];
            }
            y_end = yof(x);
        }
        let plus = mp::cabs_f64(&Complex::with_val(wp, &y_end - y));
        let minus = mp::cabs_f64(&Complex::with_val(wp, &y_end + y));
        if minus < plus {
            for zi in z.iter_mut() {
                *zi = Complex::with_val(wp, -&*zi);
            }
        }
        Ok(z)
    }
}

fn powers(x: &Complex, g: usize) -> Vec<Complex> {
    let wp = x.prec().0;
    let mut out = Vec::with_capacity(g);
    let mut p = Complex::with_val(wp, 1);
    for _ in 0..g {
        out.push(p.clone());
        p *= x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::periods;
    use crate::curve::SuperellipticCurve;
    use crate::poly::QPoly;
    use crate::rat::Q;

    fn qq(a: i64, b: i64) -> Q {
        Q::new(a.into(), b.into())
    }

    fn sum(a: &[Complex], b: &[Complex]) -> Vec<Complex> {
        a.iter().zip(b).map(|(x, y)| Complex::with_val(x.prec().0, x + y)).collect()
    }

    #[test]
    fn branch_images_are_half_periods() {
        for coeffs in [vec![0, -1, 0, 1], vec![1, 0, 0, 0, 0, 1]] {
            let c = SuperellipticCurve::hyperelliptic(&coeffs).unwrap();
            let pm = Arc::new(periods(&c, 128).unwrap());
            let aj = AbelJacobi::new(pm.clone());
            for k in 0..pm.alphas.len() {
                let z = aj.branch(k).unwrap().z;
                let r = pm.lattice_residual(&sum(&z, &z));
                assert!(r < 1e-30, "{coeffs:?} k={k} r={r:e}");
                let h = pm.lattice_residual(&z);
                assert!(h > 1e-3, "w_{k} maps to the lattice");
            }
        }
    }

    #[test]
    fn collinear_points_sum_to_zero() {
        // y = x/2 + 1/3 meets y^2 = x^3 - x in three points
        let c = SuperellipticCurve::hyperelliptic(&[0, -1, 0, 1]).unwrap();
        let pm = Arc::new(periods(&c, 128).unwrap());
        let aj = AbelJacobi::new(pm.clone());
        let line = QPoly::new(vec![qq(1, 3), qq(1, 2)]);
        let cubic = c.f() - &(&line * &line);
        let xs = mp::roots(&cubic, pm.wp).unwrap();
        let mut total = vec![Complex::new(pm.wp)];
        for x in &xs {
            let y = mp::eval_q(&line, x);
            let p = aj.point(x, &y).unwrap();
            total = sum(&total, &p.z);
        }
        let r = pm.lattice_residual(&total);
        assert!(r < 1e-30, "{r:e}");
        // opposite points cancel
        let y = mp::eval_q(&line, &xs[0]);
        let a = aj.point(&xs[0], &y).unwrap().z;
        let b = aj.point(&xs[0], &Complex::with_val(pm.wp, -&y)).unwrap().z;
        assert!(pm.lattice_residual(&sum(&a, &b)) < 1e-30);
        assert!(matches!(aj.point(&xs[0], &Complex::with_val(pm.wp, 7)), Err(AnalyticError::NotOnCurve)));
    }
}
