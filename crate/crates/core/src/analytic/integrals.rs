//! Arakelov integrals of the local height: the double integral, the
//! branch-point sum and the invariant chi.

use super::arakelov::{chi_from_integral, ArakelovMeasure, QuadratureSettings};
use super::sigma::LocalHeightContext;
use super::AnalyticError;
use crate::curve::{discriminant, SuperellipticCurve};
use crate::mp;
use rayon::prelude::*;
use rug::{Complex, Float};
use rustfft::num_complex::Complex64 as C;
use serde::Serialize;
use std::sync::Arc;

/// N in lambda = (1/N) int log|x - x(p)| mu.
const N: f64 = 2.0;

/// Measure mass defects above this are reported as non-convergence.
const MASS_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IntegrandSpec {
    One,
    LogDistance(C),
    /// lambda-hat = lambda - log|Delta| / (4g(2g+1))
    LambdaHat,
    DoubleLog,
}

impl QuadratureSettings {
    /// Finer outer grid, for integrals whose integrand is only available on it.
    pub fn fine() -> Self {
        QuadratureSettings { outer_panels: 6, outer_order: 12, outer_angular: 256, ..Self::default() }
    }

    /// Cheap outer grid for tests of the plumbing.
    pub fn coarse() -> Self {
        QuadratureSettings { panels: 32, outer_panels: 2, outer_order: 8, outer_angular: 64, ..Self::default() }
    }
}

/// log|Delta| with Delta = 2^{4g} disc(f).
pub fn log_abs_delta(curve: &SuperellipticCurve, prec: u32) -> Float {
    let (d, _) = discriminant(curve);
    let four_g = 4 * curve.genus() as u32;
    Float::with_val(prec, mp::log_abs_q(prec, &d) + four_g * Float::with_val(prec, 2).ln())
}

fn measure(curve: &SuperellipticCurve, prec: u32, settings: QuadratureSettings) -> Result<ArakelovMeasure, AnalyticError> {
    let pm = super::periods(curve, prec)?;
    let m = ArakelovMeasure::new(&pm, settings)?;
    let defect = (m.mass() - 1.0).abs();
    if defect > MASS_TOL {
        return Err(AnalyticError::QuadratureNonconvergence(format!("mass defect {defect:e}")));
    }
    Ok(m)
}

pub fn arakelov_integrate(
    curve: &SuperellipticCurve,
    spec: IntegrandSpec,
    prec: u32,
    settings: QuadratureSettings,
) -> Result<f64, AnalyticError> {
    curve.require_hyperelliptic().map_err(|_| AnalyticError::NotHyperelliptic)?;
    let m = measure(curve, prec, settings)?;
    let g = curve.genus() as f64;
    Ok(match spec {
        IntegrandSpec::One => m.mass(),
        IntegrandSpec::LogDistance(beta) => m.log_potential(beta),
        IntegrandSpec::DoubleLog => m.double_integral(),
        IntegrandSpec::LambdaHat => {
            m.double_integral() / N - log_abs_delta(curve, 64).to_f64() / (4.0 * g * (2.0 * g + 1.0))
        }
    })
}

/// The archimedean quadrature checks on one curve.
#[derive(Clone, Debug, Serialize)]
pub struct ArakelovReport {
    pub genus: usize,
    pub inner_nodes: usize,
    pub outer_nodes: usize,
    pub mass: f64,
    pub outer_mass: f64,
    /// int int log|x(p) - x(q)| mu mu
    pub double_integral: f64,
    /// int lambda mu with lambda from sigma, on the outer grid
    pub int_lambda_sigma: Option<f64>,
    /// |double integral - N int lambda mu| on the same grid
    pub fubini_residual: Option<f64>,
    /// sum of lambda over the finite ramification points, via the potential
    pub root_lambda_sum: f64,
    /// the same sum via sigma
    pub root_lambda_sum_sigma: Option<f64>,
    /// (1/4g) log|disc f|
    pub root_lambda_target: f64,
}

/// lambda at x (either sheet) through the sigma function.
fn lambda_at(ctx: &LocalHeightContext, curve: &SuperellipticCurve, x: C, prec: u32) -> Result<f64, AnalyticError> {
    let xm = Complex::with_val(prec, (x.re, x.im));
    let y = mp::eval_q(curve.f(), &xm).sqrt();
    Ok(ctx.lambda_point(&xm, &y)?.to_f64())
}

/// Runs the quadrature checks; the sigma-based columns need g <= 2 and are
/// skipped when `with_sigma` is false.
pub fn arakelov_report(
    curve: &SuperellipticCurve,
    prec: u32,
    settings: QuadratureSettings,
    with_sigma: bool,
) -> Result<ArakelovReport, AnalyticError> {
    curve.require_hyperelliptic().map_err(|_| AnalyticError::NotHyperelliptic)?;
    let pm = Arc::new(super::periods(curve, prec)?);
    let m = ArakelovMeasure::new(&pm, settings)?;
    let g = curve.genus();
    let nodes = m.outer_nodes();
    let phi: Vec<f64> = nodes.par_iter().map(|n| m.log_potential(n.x)).collect();
    let double_integral: f64 = nodes.iter().zip(&phi).map(|(n, v)| n.weight * v).sum();
    let outer_mass = nodes.iter().map(|n| n.weight).sum();
    let (d, _) = discriminant(curve);
    let root_lambda_target = mp::log_abs_q(64, &d).to_f64() / (4.0 * g as f64);
    let alphas: Vec<C> = pm
        .alphas
        .iter()
        .map(|a| {
            let (re, im) = mp::to_c64(a);
            C::new(re, im)
        })
        .collect();
    let root_lambda_sum = alphas.iter().map(|a| m.log_potential(*a) / N).sum();

    let (mut int_lambda_sigma, mut fubini_residual, mut root_lambda_sum_sigma) = (None, None, None);
    if with_sigma {
        let ctx = LocalHeightContext::from_periods(pm.clone())?;
        let lam: Result<Vec<f64>, AnalyticError> =
            nodes.par_iter().map(|n| lambda_at(&ctx, curve, n.x, prec)).collect();
        let il: f64 = nodes.iter().zip(&lam?).map(|(n, v)| n.weight * v).sum();
        int_lambda_sigma = Some(il);
        fubini_residual = Some((double_integral - N * il).abs());
        let mut s = 0.0;
        for k in 0..alphas.len() {
            s += ctx.lambda_branch(k)?.to_f64();
        }
        root_lambda_sum_sigma = Some(s);
    }
    Ok(ArakelovReport {
        genus: g,
        inner_nodes: m.inner_node_count(),
        outer_nodes: nodes.len(),
        mass: m.mass(),
        outer_mass,
        double_integral,
        int_lambda_sigma,
        fubini_residual,
        root_lambda_sum,
        root_lambda_sum_sigma,
        root_lambda_target,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiReport {
    pub genus: usize,
    pub chi: f64,
    pub int_lambda: f64,
    pub log_abs_delta: f64,
    /// (2g-2)/(2g+1) chi, the archimedean summand of the admissible self-intersection
    pub omega_term: f64,
    /// chi >= 0 is expected (and known for g = 2)
    pub nonnegative: bool,
    pub outer_mass: f64,
}

/// Tolerance below zero before a genus-2 chi counts as negative.
pub const CHI_TOL: f64 = 1e-3;

pub fn chi_invariant(curve: &SuperellipticCurve, prec: u32, settings: QuadratureSettings) -> Result<ChiReport, AnalyticError> {
    curve.require_hyperelliptic().map_err(|_| AnalyticError::NotHyperelliptic)?;
    let g = curve.genus();
    if g < 2 {
        return Err(AnalyticError::GenusTooSmall(g));
    }
    let m = measure(curve, prec, settings)?;
    let outer_mass = m.outer_nodes().iter().map(|n| n.weight).sum();
    let int_lambda = m.double_integral() / N;
    let lad = log_abs_delta(curve, 64).to_f64();
    let chi = chi_from_integral(g, int_lambda, lad);
    if g == 2 && chi < -CHI_TOL {
        return Err(AnalyticError::NegativeChiGenus2(chi));
    }
    Ok(ChiReport {
        genus: g,
        chi,
        int_lambda,
        log_abs_delta: lad,
        omega_term: (2.0 * g as f64 - 2.0) / (2.0 * g as f64 + 1.0) * chi,
        nonnegative: chi >= -CHI_TOL,
        outer_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(c: &[i64]) -> SuperellipticCurve {
        SuperellipticCurve::hyperelliptic(c).unwrap()
    }

    #[test]
    fn integrand_specs() {
        let c = curve(&[0, -1, 0, 1]);
        let s = QuadratureSettings::coarse();
        let one = arakelov_integrate(&c, IntegrandSpec::One, 96, s).unwrap();
        assert!((one - 1.0).abs() < 1e-8);
        let v = arakelov_integrate(&c, IntegrandSpec::LogDistance(C::new(1.0, 0.0)), 96, s).unwrap();
        assert!((v - 0.5 * 2f64.ln()).abs() < 1e-8, "{v}");
        let dl = arakelov_integrate(&c, IntegrandSpec::DoubleLog, 96, s).unwrap();
        let lh = arakelov_integrate(&c, IntegrandSpec::LambdaHat, 96, s).unwrap();
        // log|Delta| = 4 log 2 + log 4 for x^3 - x
        assert!((lh - (dl / 2.0 - 6.0 * 2f64.ln() / 12.0)).abs() < 1e-12);
        // elliptic curves: lambda-hat has mean zero
        assert!(lh.abs() < 1e-3, "{lh}");
    }

    #[test]
    fn report_on_coarse_grid() {
        let c = curve(&[0, -1, 0, 1]);
        let r = arakelov_report(&c, 96, QuadratureSettings::coarse(), true).unwrap();
        assert!((r.mass - 1.0).abs() < 1e-8);
        assert!(r.fubini_residual.unwrap() < 1e-6, "{r:?}");
        assert!((r.root_lambda_sum - r.root_lambda_target).abs() < 1e-8);
        assert!((r.root_lambda_sum_sigma.unwrap() - r.root_lambda_target).abs() < 1e-12);
    }

    #[test]
    fn chi_needs_genus_two() {
        let s = QuadratureSettings::coarse();
        assert_eq!(chi_invariant(&curve(&[0, -1, 0, 1]), 96, s).unwrap_err(), AnalyticError::GenusTooSmall(1));
        let r = chi_invariant(&curve(&[1, 0, 0, 0, 0, 1]), 96, s).unwrap();
        assert!(r.nonnegative, "{r:?}");
        let lh = arakelov_integrate(&curve(&[1, 0, 0, 0, 0, 1]), IntegrandSpec::LambdaHat, 96, s).unwrap();
        assert!((r.chi - 20.0 * lh).abs() < 1e-9);
        assert!((r.omega_term - 0.4 * r.chi).abs() < 1e-15);
    }
}
