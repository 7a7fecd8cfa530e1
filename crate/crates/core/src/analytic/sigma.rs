//! Sigma function sigma(z) = gamma exp(-z^T eta' omega'^{-1} z / 2) theta[delta](omega'^{-1} z)
//! and its norm, the derivative sigma_sharp and the archimedean local height.
//!
//! The characteristic is the odd one vanishing on the image of the curve,
//! found numerically at a generic point since it depends on the homology
//! basis. |gamma| is fixed by the leading term sigma(z) = z_1 + ... .

use super::abel::{AbelJacobi, AbelJacobiPoint};
use super::linalg::*;
use super::periods::PeriodMatrices;
use super::theta::{Characteristic, Theta};
use super::AnalyticError;
use crate::curve::SuperellipticCurve;
use crate::mp;
use rug::{Complex, Float};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct SigmaEvaluator {
    pub periods: Arc<PeriodMatrices>,
    pub theta: Theta,
    pub delta: Characteristic,
    pub gamma_modulus: Float,
    /// |theta[delta]| at the probe point, normalized; zero up to rounding
    pub delta_residual: f64,
    /// smallest normalized |theta[eps]| at the probe over the other odd eps
    pub delta_gap: f64,
    /// |gamma| times the z_2 coefficient of sigma (g = 2; must vanish)
    pub linear_term_residual: f64,
    /// eta' omega'^{-1}
    quad: CMat,
    dirs: Vec<Vec<Complex>>,
}

impl SigmaEvaluator {
    pub fn new(pm: Arc<PeriodMatrices>) -> Result<Self, AnalyticError> {
        let g = pm.g;
        if g > 2 {
            return Err(AnalyticError::UnsupportedGenus(g));
        }
        let wp = pm.wp;
        let theta = Theta::new(&pm.tau, &pm.y_inv).ok_or_else(|| AnalyticError::PrecisionLoss("Im tau is not positive definite".into()))?;
        // column k of omega'^{-1} is d(u)/d(z_k)
        let dirs: Vec<Vec<Complex>> = (0..g).map(|k| (0..g).map(|i| pm.omega1_inv[i][k].clone()).collect()).collect();
        let odd = Characteristic::odd(g);
        let tiny = 2f64.powi(-(pm.precision as i32) / 3);
        let (delta, delta_residual, delta_gap) = if g == 1 {
            (odd[0].clone(), 0.0, f64::INFINITY)
        } else {
            let aj = AbelJacobi::new(pm.clone());
            let x0 = Complex::with_val(wp, (0.3125, 0.21875));
            let y0 = mp::eval_q(&pm.f, &x0).sqrt();
            let p = aj.point(&x0, &y0)?;
            let u = pm.normalize(&p.z);
            let mut vals: Vec<(f64, Characteristic)> = odd.iter().map(|ch| (theta.normalized_abs(&u, ch, &[]).to_f64(), ch.clone())).collect();
            vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let scale = vals.last().map(|v| v.0).unwrap_or(1.0).max(1e-300);
            (vals[0].1.clone(), vals[0].0 / scale, vals[1].0 / scale)
        };
        if delta_residual > tiny || delta_gap < 1e-6 {
            return Err(AnalyticError::PrecisionLoss(format!(
                "no odd characteristic vanishes on the curve (best {delta_residual:e}, next {delta_gap:e})"
            )));
        }
        let zero = vec![Complex::new(wp); g];
        let d1 = theta.eval(&zero, &delta, &dirs[..1]);
        let gamma_modulus = mp::cabs(&d1).recip();
        let linear_term_residual = if g == 2 {
            Float::with_val(wp, mp::cabs(&theta.eval(&zero, &delta, &dirs[1..2])) * &gamma_modulus).to_f64()
        } else {
            0.0
        };
        if linear_term_residual > tiny {
            return Err(AnalyticError::PrecisionLoss(format!("sigma has a z_2 term {linear_term_residual:e}")));
        }
        let quad = cmul(&pm.eta1, &pm.omega1_inv);
        Ok(SigmaEvaluator { periods: pm, theta, delta, gamma_modulus, delta_residual, delta_gap, linear_term_residual, quad, dirs })
    }

    pub fn g(&self) -> usize {
        self.periods.g
    }

    /// sigma(z) with gamma replaced by |gamma|.
    pub fn sigma(&self, z: &[Complex]) -> Complex {
        let wp = self.periods.wp;
        let u = self.periods.normalize(z);
        let qz = cmul_vec(&self.quad, z);
        let mut q = Complex::new(wp);
        for (a, b) in z.iter().zip(&qz) {
            q += Complex::with_val(wp, a * b);
        }
        let pre = Complex::with_val(wp, -q / 2u32).exp();
        Complex::with_val(wp, pre * self.theta.eval(&u, &self.delta, &[])) * &self.gamma_modulus
    }

    /// ||sigma||(z) = |gamma| |theta[delta](u)| exp(-pi Im u^T Y^-1 Im u), u = omega'^{-1} z.
    pub fn norm_sigma(&self, z: &[Complex]) -> Float {
        let u = self.periods.normalize(z);
        Float::with_val(self.periods.wp, self.theta.normalized_abs(&u, &self.delta, &[]) * &self.gamma_modulus)
    }

    /// ||sigma_sharp||; sigma_sharp = sigma for g = 1 and d sigma / d z_2 for g = 2.
    /// The norm is taken on the image of the curve where lower derivatives vanish.
    pub fn norm_sigma_sharp(&self, z: &[Complex]) -> Result<Float, AnalyticError> {
        match self.g() {
            1 => Ok(self.norm_sigma(z)),
            2 => {
                let u = self.periods.normalize(z);
                Ok(Float::with_val(self.periods.wp, self.theta.normalized_abs(&u, &self.delta, &self.dirs[1..2]) * &self.gamma_modulus))
            }
            g => Err(AnalyticError::UnsupportedGenus(g)),
        }
    }

    /// lambda(p) = -(1/g) log ||sigma_sharp||(AJ(p)).
    pub fn lambda(&self, p: &AbelJacobiPoint) -> Result<Float, AnalyticError> {
        let n = self.norm_sigma_sharp(&p.z)?;
        if n.is_zero() {
            return Err(AnalyticError::PointAtInfinity);
        }
        Ok(Float::with_val(self.periods.wp, -n.ln() / self.g() as u32))
    }

    /// L(w, z) = w^T (eta' z' + eta'' z'') with z = omega' z' + omega'' z''.
    pub fn l_form(&self, w: &[Complex], z: &[Complex]) -> Complex {
        let pm = &*self.periods;
        let wp = pm.wp;
        let (zp, zpp) = pm.real_coordinates(z);
        let mut s = Complex::new(wp);
        for i in 0..pm.g {
            let mut row = Complex::new(wp);
            for j in 0..pm.g {
                row += Complex::with_val(wp, &pm.eta1[i][j] * &zp[j]);
                row += Complex::with_val(wp, &pm.eta2[i][j] * &zpp[j]);
            }
            s += Complex::with_val(wp, &w[i] * &row);
        }
        s
    }

    /// |sigma(z)| exp(s Re L(z, z) / 2) for the sign s.
    pub fn norm_sigma_via_l(&self, z: &[Complex], s: i32) -> Float {
        let wp = self.periods.wp;
        let l = self.l_form(z, z);
        let e = Float::with_val(wp, Float::with_val(wp, l.real() * s) / 2i32).exp();
        Float::with_val(wp, mp::cabs(&self.sigma(z)) * e)
    }

    /// chi(l) = exp(2 pi i (l'^T delta' - l''^T delta'') - pi i l'^T l'') for l = omega' l' + omega'' l''.
    pub fn chi(&self, n1: &[i64], n2: &[i64]) -> Complex {
        let wp = self.periods.wp;
        let mut t = Float::new(wp);
        for i in 0..self.g() {
            t += Float::with_val(wp, (n1[i] * self.delta.a[i] as i64 - n2[i] * self.delta.b[i] as i64) as f64);
            t -= Float::with_val(wp, (n1[i] * n2[i]) as f64);
        }
        let ang = Float::with_val(wp, t * mp::pi(wp));
        Complex::with_val(wp, (ang.clone().cos(), ang.sin()))
    }

    /// Relative residual of sigma(z + l) = chi(l) sigma(z) exp(s L(z + l/2, l)).
    pub fn functional_residual(&self, z: &[Complex], n1: &[i64], n2: &[i64], s: i32) -> f64 {
        let pm = &*self.periods;
        let wp = pm.wp;
        let l = pm.lattice_vector(n1, n2);
        let zl: Vec<Complex> = z.iter().zip(&l).map(|(a, b)| Complex::with_val(wp, a + b)).collect();
        let mid: Vec<Complex> = z.iter().zip(&l).map(|(a, b)| Complex::with_val(wp, a + Complex::with_val(wp, b / 2u32))).collect();
        let lhs = self.sigma(&zl);
        let ex = Complex::with_val(wp, self.l_form(&mid, &l) * s).exp();
        let rhs = Complex::with_val(wp, self.chi(n1, n2) * self.sigma(z)) * ex;
        let d = mp::cabs(&Complex::with_val(wp, &lhs - &rhs));
        Float::with_val(wp, d / mp::cabs(&lhs)).to_f64()
    }

    /// log |gamma|^8 minus log |pi^{4g} det(omega')^{-4} disc(f)^{-1}|, with disc = prod (a_i - a_j)^2.
    pub fn gamma_relation_residual(&self) -> f64 {
        let pm = &*self.periods;
        let wp = pm.wp;
        let g = pm.g as u32;
        let mut disc = mp::cone(wp);
        for i in 0..pm.alphas.len() {
            for j in i + 1..pm.alphas.len() {
                let d = Complex::with_val(wp, &pm.alphas[i] - &pm.alphas[j]);
                disc *= Complex::with_val(wp, d.square_ref());
            }
        }
        let det = mp::cabs(&cdet(&pm.omega1));
        let rhs = Float::with_val(wp, 4 * g * mp::pi(wp).ln()) - Float::with_val(wp, 4 * det.ln()) - mp::cabs(&disc).ln();
        let lhs = Float::with_val(wp, 8 * self.gamma_modulus.clone().ln());
        Float::with_val(wp, lhs - rhs).to_f64()
    }
}

/// Everything needed to evaluate the archimedean local height on one curve.
pub struct LocalHeightContext {
    pub aj: AbelJacobi,
    pub sigma: SigmaEvaluator,
}

impl LocalHeightContext {
    pub fn new(curve: &SuperellipticCurve, precision: u32) -> Result<Self, AnalyticError> {
        Self::from_periods(Arc::new(super::periods(curve, precision)?))
    }

    pub fn from_periods(pm: Arc<PeriodMatrices>) -> Result<Self, AnalyticError> {
        let sigma = SigmaEvaluator::new(pm.clone())?;
        Ok(LocalHeightContext { aj: AbelJacobi::new(pm), sigma })
    }

    pub fn periods(&self) -> &PeriodMatrices {
        &self.sigma.periods
    }

    pub fn lambda_point(&self, x: &Complex, y: &Complex) -> Result<Float, AnalyticError> {
        let p = self.aj.point(x, y)?;
        self.sigma.lambda(&p)
    }

    pub fn lambda_branch(&self, k: usize) -> Result<Float, AnalyticError> {
        let p = self.aj.branch(k)?;
        self.sigma.lambda(&p)
    }
}

/// lambda_infinity at (x, y), or at the point at infinity (an error).
pub fn lambda_arch(curve: &SuperellipticCurve, point: Option<(&Complex, &Complex)>, precision: u32) -> Result<Float, AnalyticError> {
    let (x, y) = point.ok_or(AnalyticError::PointAtInfinity)?;
    LocalHeightContext::new(curve, precision)?.lambda_point(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::BranchData;

    fn ctx(c: &[i64], p: u32) -> (SuperellipticCurve, LocalHeightContext) {
        let curve = SuperellipticCurve::hyperelliptic(c).unwrap();
        let h = LocalHeightContext::new(&curve, p).unwrap();
        (curve, h)
    }

    #[test]
    fn lambda_at_roots_matches_derivative() {
        for c in [vec![0, -1, 0, 1], vec![2, 0, 0, 1], vec![1, 0, 0, 0, 0, 1], vec![0, -1, 0, 0, 0, 1]] {
            let (curve, h) = ctx(&c, 128);
            let g = curve.genus() as f64;
            let b = BranchData::new(&curve, 128).unwrap();
            for k in 0..b.len() {
                let lam = h.lambda_branch(k).unwrap().to_f64();
                let want = mp::cabs_f64(&b.fprime[k]).ln() / (4.0 * g);
                assert!((lam - want).abs() < 1e-20, "{c:?} k={k}: {lam} vs {want}");
            }
        }
    }

    #[test]
    fn gamma_relation_and_linear_term() {
        for c in [vec![2, 0, 0, 1], vec![1, 0, 0, 0, 0, 1]] {
            let (_, h) = ctx(&c, 128);
            assert!(h.sigma.gamma_relation_residual().abs() < 1e-25);
            assert!(h.sigma.linear_term_residual < 1e-25);
        }
    }

    #[test]
    fn norm_and_functional_equation() {
        for c in [vec![2, 0, 0, 1], vec![1, 0, 0, 0, 0, 1]] {
            let (_, h) = ctx(&c, 128);
            let s = &h.sigma;
            let g = s.g();
            let wp = s.periods.wp;
            let z: Vec<Complex> = (0..g).map(|i| Complex::with_val(wp, (0.13 - 0.08 * i as f64, 0.07 + 0.05 * i as f64))).collect();
            let n = s.norm_sigma(&z).to_f64();
            let via = s.norm_sigma_via_l(&z, 1).to_f64();
            assert!((n - via).abs() < 1e-25 * n);
            let mut n1 = vec![0; g];
            let mut n2 = vec![0; g];
            n1[0] = 1;
            n2[g - 1] = -1;
            assert!(s.functional_residual(&z, &n1, &n2, -1) < 1e-25);
            assert!(s.functional_residual(&z, &n2, &n1, -1) < 1e-25);
            assert!(s.functional_residual(&z, &n1, &n2, 1) > 1e-3);
            let l = s.periods.lattice_vector(&n1, &n2);
            let zl: Vec<Complex> = z.iter().zip(&l).map(|(a, b)| Complex::with_val(wp, a + b)).collect();
            assert!((s.norm_sigma(&zl).to_f64() - n).abs() < 1e-25 * n);
        }
    }

    #[test]
    fn lambda_near_infinity_and_parallelogram() {
        let (curve, h) = ctx(&[0, -1, 0, 1], 128);
        let wp = h.periods().wp;
        let pt = |x: Complex| {
            let y = mp::eval_q(curve.f(), &x).sqrt();
            (x, y)
        };
        // lambda(p) - log|x|/2 -> 0
        let mut last = f64::INFINITY;
        for r in [1e2, 1e4, 1e6] {
            let (x, y) = pt(Complex::with_val(wp, (r, 0.3 * r)));
            let d = h.lambda_point(&x, &y).unwrap().to_f64() - 0.5 * mp::cabs_f64(&x).ln();
            assert!(d.abs() < last);
            last = d.abs();
        }
        assert!(last < 1e-5);
        // lambda(p+q) + lambda(p-q) - 2 lambda(p) - 2 lambda(q) + log|x(p) - x(q)| = 0 using the chord-tangent law
        let (x1, y1) = pt(Complex::with_val(wp, (2.0, 0.5)));
        let (x2, y2) = pt(Complex::with_val(wp, (-0.4, 1.1)));
        let add = |xa: &Complex, ya: &Complex, xb: &Complex, yb: &Complex| {
            let m = Complex::with_val(wp, Complex::with_val(wp, yb - ya) / Complex::with_val(wp, xb - xa));
            let x3 = Complex::with_val(wp, Complex::with_val(wp, m.square_ref()) - xa) - xb;
            let y3 = -Complex::with_val(wp, ya + Complex::with_val(wp, &m * Complex::with_val(wp, &x3 - xa)));
            (x3, y3)
        };
        let (xs, ys) = add(&x1, &y1, &x2, &y2);
        let (xd, yd) = add(&x1, &y1, &x2, &Complex::with_val(wp, -&y2));
        let l = |x: &Complex, y: &Complex| h.lambda_point(x, y).unwrap();
        let mut r = l(&xs, &ys) + l(&xd, &yd);
        r -= 2 * l(&x1, &y1);
        r -= 2 * l(&x2, &y2);
        r += mp::cabs(&Complex::with_val(wp, &x1 - &x2)).ln();
        assert!(r.to_f64().abs() < 1e-25, "{r}");
    }

    #[test]
    fn genus_three_is_unsupported() {
        let curve = SuperellipticCurve::hyperelliptic(&[1, 0, 0, 0, 0, 0, 0, 1]).unwrap();
        let pm = Arc::new(super::super::periods(&curve, 96).unwrap());
        assert!(matches!(SigmaEvaluator::new(pm), Err(AnalyticError::UnsupportedGenus(3))));
    }
}
