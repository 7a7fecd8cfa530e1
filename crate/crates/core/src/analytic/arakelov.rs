//! The Arakelov measure mu = (i/2g) sum (Im tau)^{-1}_{jk} u_j ^ conj(u_k) and
//! integrals against it, pushed to the x-plane (both sheets).
//!
//! The plane is covered by overlapping discs with a smooth partition of
//! unity: one disc per root in v (x = alpha + v^2), one at infinity in t
//! (x = c + t^-2) and one middle disc in x. Each disc carries a polar grid
//! (Gauss–Legendre in u with r = R u^2, trapezoid in angle). Logarithmic
//! potentials come from the angular Fourier expansion of log|zeta - s|; when
//! s lies inside a disc the radial integral is split at |s| and the ring
//! coefficients are interpolated to the new nodes.

use super::periods::PeriodMatrices;
use super::AnalyticError;
use crate::mp;
use rayon::prelude::*;
use rug::Float;
use rustfft::num_complex::Complex64 as C;
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSettings {
    /// radial panels per disc
    pub panels: usize,
    /// Gauss–Legendre nodes per panel
    pub order: usize,
    pub angular: usize,
    /// the same three parameters for the outer grid used by `integrate`
    pub outer_panels: usize,
    pub outer_order: usize,
    pub outer_angular: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { panels: 64, order: 12, angular: 1024, outer_panels: 4, outer_order: 8, outer_angular: 128 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PatchKind {
    Root(usize),
    Infinity,
    Middle,
}

#[derive(Clone, Debug)]
struct Ring {
    r: f64,
    /// radial weight times the 2 pi r dr Jacobian
    wr: f64,
    /// c[m] = mean_k h(r, theta_k) e^{-i m theta_k}, truncated where negligible
    c: Vec<C>,
}

#[derive(Clone, Debug)]
struct Panel {
    a: f64,
    b: f64,
    u: Vec<f64>,
    bary: Vec<f64>,
    /// index of the first ring
    start: usize,
    end: usize,
    /// sum wr c_0 and sum wr c_0 log r over the panel
    mass: f64,
    log_moment: f64,
    /// sum wr (r / r_b)^m c_m and sum wr (r_a / r)^m c_m
    low: Vec<C>,
    high: Vec<C>,
}

#[derive(Clone, Debug)]
struct Patch {
    kind: PatchKind,
    radius: f64,
    rings: Vec<Ring>,
    panels: Vec<Panel>,
    /// multipole moments sum_j wr_j r_j^m c_j[m]
    moments: Vec<C>,
    mass: f64,
}

#[derive(Clone, Debug)]
pub struct ArakelovMeasure {
    pub g: usize,
    pub settings: QuadratureSettings,
    alphas: Vec<C>,
    /// coefficients of f, ascending
    f: Vec<C>,
    w: Vec<Vec<C>>,
    y_inv: Vec<Vec<f64>>,
    center: C,
    root_radius: Vec<f64>,
    r1: f64,
    patches: Vec<Patch>,
    gl_nodes: Vec<(f64, f64)>,
}

/// One node of an outer grid: a point x with its measure weight.
#[derive(Clone, Copy, Debug)]
pub struct MeasureNode {
    pub x: C,
    pub weight: f64,
    pub patch: PatchKind,
}

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// 1 for d <= r0, 0 for d >= r1.
fn bump(d: f64, r0: f64, r1: f64) -> f64 {
    smooth_step((r1 - d) / (r1 - r0))
}

fn gl01(n: usize) -> Vec<(f64, f64)> {
    mp::gauss_legendre(n, 64)
        .iter()
        .map(|(x, w)| ((x.to_f64() + 1.0) / 2.0, w.to_f64() / 2.0))
        .collect()
}

fn barycentric(u: &[f64]) -> Vec<f64> {
    (0..u.len())
        .map(|j| {
            let p: f64 = (0..u.len()).filter(|&k| k != j).map(|k| u[j] - u[k]).product();
            1.0 / p
        })
        .collect()
}

/// Row of interpolation coefficients from nodes u to the point t.
fn interp_row(u: &[f64], bary: &[f64], t: f64) -> Vec<f64> {
    if let Some(j) = u.iter().position(|&x| x == t) {
        let mut row = vec![0.0; u.len()];
        row[j] = 1.0;
        return row;
    }
    let terms: Vec<f64> = u.iter().zip(bary).map(|(x, b)| b / (t - x)).collect();
    let s: f64 = terms.iter().sum();
    terms.into_iter().map(|x| x / s).collect()
}

impl ArakelovMeasure {
    pub fn new(pm: &PeriodMatrices, settings: QuadratureSettings) -> Result<Self, AnalyticError> {
        let g = pm.g;
        let alphas: Vec<C> = pm.alphas.iter().map(|a| {
            let (x, y) = mp::to_c64(a);
            C::new(x, y)
        }).collect();
        let f: Vec<C> = pm.f.coeffs().iter().map(|q| C::new(mp::fq(64, q).to_f64(), 0.0)).collect();
        let w = pm.omega1_inv.iter().map(|row| row.iter().map(|z| {
            let (x, y) = mp::to_c64(z);
            C::new(x, y)
        }).collect()).collect();
        let y_inv = pm.y_inv.iter().map(|row| row.iter().map(Float::to_f64).collect()).collect();
        let n = alphas.len();
        let center = alphas.iter().sum::<C>() / n as f64;
        let root_radius: Vec<f64> = (0..n)
            .map(|k| 0.4 * (0..n).filter(|&j| j != k).map(|j| (alphas[k] - alphas[j]).norm()).fold(f64::INFINITY, f64::min))
            .collect();
        let reach = (0..n).map(|k| (alphas[k] - center).norm() + root_radius[k]).fold(0.0, f64::max);
        let r1 = reach.max(0.5);
        let gl_nodes = gl01(settings.order);
        let mut m = ArakelovMeasure { g, settings, alphas, f, w, y_inv, center, root_radius, r1, patches: Vec::new(), gl_nodes };
        let mut kinds: Vec<PatchKind> = (0..n).map(PatchKind::Root).collect();
        kinds.push(PatchKind::Infinity);
        kinds.push(PatchKind::Middle);
        let patches: Vec<Patch> = kinds.par_iter().map(|&k| m.build_patch(k)).collect();
        m.patches = patches;
        let mass = m.mass();
        if !(mass - 1.0).abs().is_finite() || (mass - 1.0).abs() > 1e-4 {
            return Err(AnalyticError::QuadratureNonconvergence(format!("total mass {mass}")));
        }
        Ok(m)
    }

    fn patch_radius(&self, kind: PatchKind) -> f64 {
        match kind {
            PatchKind::Root(k) => self.root_radius[k].sqrt(),
            PatchKind::Infinity => self.r1.powf(-0.5),
            PatchKind::Middle => 2.0 * self.r1,
        }
    }

    /// x as a function of the patch coordinate.
    pub fn x_of(&self, kind: PatchKind, z: C) -> C {
        match kind {
            PatchKind::Root(k) => self.alphas[k] + z * z,
            PatchKind::Infinity => self.center + (z * z).inv(),
            PatchKind::Middle => self.center + z,
        }
    }

    fn quad_form(&self, a: &[C]) -> f64 {
        let g = self.g;
        let wa: Vec<C> = (0..g).map(|i| (0..g).map(|j| self.w[i][j] * a[j]).sum()).collect();
        let mut q = 0.0;
        for i in 0..g {
            for j in 0..g {
                q += self.y_inv[i][j] * (wa[i] * wa[j].conj()).re;
            }
        }
        q
    }

    fn eval_f(&self, x: C) -> C {
        self.f.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    fn chi_root(&self, k: usize, x: C) -> f64 {
        let r = self.root_radius[k];
        bump((x - self.alphas[k]).norm(), 0.5 * r, r)
    }

    fn chi_inf(&self, x: C) -> f64 {
        1.0 - bump((x - self.center).norm(), self.r1, 2.0 * self.r1)
    }

    /// Density of mu (both sheets) with respect to area in the x-plane.
    pub fn density_x(&self, x: C) -> f64 {
        let a: Vec<C> = (0..self.g).scan(C::new(1.0, 0.0), |p, _| {
            let v = *p;
            *p *= x;
            Some(v)
        }).collect();
        self.quad_form(&a) / (2.0 * self.g as f64 * self.eval_f(x).norm())
    }

    /// Partition-weighted density in the patch coordinate.
    fn weight(&self, kind: PatchKind, z: C) -> f64 {
        let g = self.g;
        match kind {
            PatchKind::Root(k) => {
                let x = self.x_of(kind, z);
                let chi = self.chi_root(k, x);
                if chi == 0.0 {
                    return 0.0;
                }
                // f(x) / (x - alpha_k)
                let mut gk = C::new(1.0, 0.0);
                for (j, a) in self.alphas.iter().enumerate() {
                    if j != k {
                        gk *= x - a;
                    }
                }
                let a: Vec<C> = (0..g).scan(C::new(1.0, 0.0), |p, _| {
                    let v = *p;
                    *p *= x;
                    Some(v)
                }).collect();
                chi * self.quad_form(&a) / (g as f64 * gk.norm())
            }
            PatchKind::Infinity => {
                if z.norm() == 0.0 {
                    return 0.0;
                }
                let x = self.x_of(kind, z);
                let chi = self.chi_inf(x);
                if chi == 0.0 {
                    return 0.0;
                }
                let t2 = z * z;
                let mut s = C::new(1.0, 0.0);
                for a in &self.alphas {
                    s *= C::new(1.0, 0.0) - (a - self.center) * t2;
                }
                let lead = t2.powu(g as u32 - 1);
                let a: Vec<C> = (0..g).scan(lead, |p, _| {
                    let v = *p;
                    *p *= x;
                    Some(v)
                }).collect();
                chi * self.quad_form(&a) / (g as f64 * s.norm())
            }
            PatchKind::Middle => {
                let x = self.x_of(kind, z);
                let rest = 1.0 - self.chi_inf(x) - (0..self.alphas.len()).map(|k| self.chi_root(k, x)).sum::<f64>();
                if rest <= 0.0 {
                    return 0.0;
                }
                rest * self.density_x(x)
            }
        }
    }

    /// Panel breakpoints in u: uniform, plus the inner edge of the partition transition.
    fn breakpoints(&self, kind: PatchKind, n: usize) -> Vec<f64> {
        let n = n.max(1);
        let mut b: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let edge = match kind {
            PatchKind::Middle => 0.5f64.sqrt(),
            _ => 0.5f64.powf(0.25),
        };
        if b.iter().all(|x| (x - edge).abs() > 1e-3) {
            b.push(edge);
        }
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b
    }

    fn build_patch(&self, kind: PatchKind) -> Patch {
        let radius = self.patch_radius(kind);
        let nt = self.settings.angular;
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(nt);
        let bps = self.breakpoints(kind, self.settings.panels);
        let mut rings = Vec::new();
        let mut panels = Vec::new();
        for w in bps.windows(2) {
            let (a, b) = (w[0], w[1]);
            let u: Vec<f64> = self.gl_nodes.iter().map(|(t, _)| a + (b - a) * t).collect();
            let start = rings.len();
            panels.push(Panel { a, b, bary: barycentric(&u), u: u.clone(), start, end: start + u.len(), mass: 0.0, log_moment: 0.0, low: Vec::new(), high: Vec::new() });
            for (&uu, &(_, wt)) in u.iter().zip(&self.gl_nodes) {
                let r = radius * uu * uu;
                // dA = r dr dtheta, dr = 2 R u du
                let wr = wt * (b - a) * 2.0 * radius * uu * r * 2.0 * PI;
                let mut buf: Vec<C> = (0..nt)
                    .map(|k| {
                        let th = 2.0 * PI * k as f64 / nt as f64;
                        C::new(self.weight(kind, C::from_polar(r, th)), 0.0)
                    })
                    .collect();
                fft.process(&mut buf);
                buf.truncate(nt / 2);
                let c: Vec<C> = buf.into_iter().map(|v| v / nt as f64).collect();
                rings.push(Ring { r, wr, c });
            }
        }
        // drop modes at the rounding floor of the patch
        let top = rings.iter().flat_map(|g| g.c.iter().map(|v| v.norm())).fold(0.0, f64::max);
        for g in rings.iter_mut() {
            let keep = g.c.iter().rposition(|v| v.norm() > 1e-15 * top).unwrap_or(0) + 1;
            g.c.truncate(keep);
        }
        for panel in panels.iter_mut() {
            let (ra, rb) = (radius * panel.a * panel.a, radius * panel.b * panel.b);
            let local = &rings[panel.start..panel.end];
            let ml = local.iter().map(|g| g.c.len()).max().unwrap_or(1);
            panel.mass = local.iter().map(|g| g.wr * g.c[0].re).sum();
            panel.log_moment = local.iter().map(|g| g.wr * g.c[0].re * g.r.ln()).sum();
            panel.low = (0..ml).map(|m| local.iter().filter(|g| m < g.c.len()).map(|g| g.c[m] * g.wr * (g.r / rb).powi(m as i32)).sum()).collect();
            panel.high = (0..ml).map(|m| local.iter().filter(|g| m < g.c.len()).map(|g| g.c[m] * g.wr * (ra / g.r).powi(m as i32)).sum()).collect();
        }
        let mmax = rings.iter().map(|r| r.c.len()).max().unwrap_or(1);
        let moments = (0..mmax)
            .map(|m| {
                rings
                    .iter()
                    .filter(|g| m < g.c.len())
                    .map(|g| g.c[m] * g.wr * g.r.powi(m as i32))
                    .sum()
            })
            .collect();
        let mass = rings.iter().map(|g| g.wr * g.c[0].re).sum();
        Patch { kind, radius, rings, panels, moments, mass }
    }

    pub fn mass(&self) -> f64 {
        self.patches.iter().map(|p| p.mass).sum()
    }

    pub fn inner_node_count(&self) -> usize {
        self.patches.iter().map(|p| p.rings.len()).sum::<usize>() * self.settings.angular
    }

    pub fn patch_masses(&self) -> Vec<(PatchKind, f64)> {
        self.patches.iter().map(|p| (p.kind, p.mass)).collect()
    }

    /// Angular integral of c(theta) log|r e^{i theta} - s| / (2 pi), times wr.
    fn ring_potential(c: &[C], r: f64, wr: f64, s: C, rs: f64) -> f64 {
        let (small, big) = if r < rs { (r, rs) } else { (rs, r) };
        let ratio = small / big;
        let e = if rs > 0.0 { s / rs } else { C::new(1.0, 0.0) };
        let mut ring = c[0].re * big.ln();
        let mut em = C::new(1.0, 0.0);
        let mut q = 1.0;
        for (m, cm) in c.iter().enumerate().skip(1) {
            em *= e;
            q *= ratio;
            if q < 1e-18 {
                break;
            }
            ring -= (cm * em).re * q / m as f64;
        }
        wr * ring
    }

    /// int log|zeta - s| h(zeta) dA over one patch.
    fn potential(&self, p: &Patch, s: C) -> f64 {
        let rs = s.norm();
        if rs >= p.radius {
            let mut acc = p.moments[0].re * rs.ln();
            let e = s / rs;
            let mut em = C::new(1.0, 0.0);
            let mut rm = 1.0;
            for m in 1..p.moments.len() {
                em *= e;
                rm /= rs;
                acc -= (p.moments[m] * em).re * rm / m as f64;
            }
            return acc;
        }
        if rs == 0.0 {
            return p.rings.iter().map(|g| g.wr * g.c[0].re * g.r.ln()).sum();
        }
        let us = (rs / p.radius).sqrt();
        let e = s / rs;
        let mut acc = 0.0;
        for panel in &p.panels {
            if us >= panel.b || us <= panel.a {
                // whole panel on one side of |s|: aggregated expansion
                let (q, mom) = if us >= panel.b {
                    acc += panel.mass * rs.ln();
                    (p.radius * panel.b * panel.b / rs, &panel.low)
                } else {
                    acc += panel.log_moment;
                    (rs / (p.radius * panel.a * panel.a), &panel.high)
                };
                let mut em = C::new(1.0, 0.0);
                let mut qm = 1.0;
                for (m, cm) in mom.iter().enumerate().skip(1) {
                    em *= e;
                    qm *= q;
                    if qm < 1e-18 {
                        break;
                    }
                    acc -= (cm * em).re * qm / m as f64;
                }
                continue;
            }
            // split the panel at u_s and interpolate the ring coefficients
            let local = &p.rings[panel.start..panel.end];
            let mlen = local.iter().map(|g| g.c.len()).max().unwrap_or(1);
            for (lo, hi) in [(panel.a, us), (us, panel.b)] {
                for &(t, w) in &self.gl_nodes {
                    let uu = lo + (hi - lo) * t;
                    let r = p.radius * uu * uu;
                    let wr = w * (hi - lo) * 2.0 * p.radius * uu * r * 2.0 * PI;
                    let row = interp_row(&panel.u, &panel.bary, uu);
                    let c: Vec<C> = (0..mlen)
                        .map(|m| row.iter().zip(local).filter(|(_, g)| m < g.c.len()).map(|(a, g)| g.c[m] * a).sum())
                        .collect();
                    acc += Self::ring_potential(&c, r, wr, s, rs);
                }
            }
        }
        acc
    }

    /// Phi(beta) = int log|x - beta| mu.
    pub fn log_potential(&self, beta: C) -> f64 {
        let mut acc = 0.0;
        for p in &self.patches {
            acc += match p.kind {
                PatchKind::Root(k) => {
                    let s = (beta - self.alphas[k]).sqrt();
                    self.potential(p, s) + self.potential(p, -s)
                }
                PatchKind::Middle => self.potential(p, beta - self.center),
                PatchKind::Infinity => {
                    // log|x - beta| = log|1 - b t^2| - 2 log|t| with b = beta - c
                    let b = beta - self.center;
                    let base = -2.0 * self.potential(p, C::new(0.0, 0.0));
                    if b.norm() == 0.0 {
                        base
                    } else {
                        let s = b.inv().sqrt();
                        base + p.mass * b.norm().ln() + self.potential(p, s) + self.potential(p, -s)
                    }
                }
            };
        }
        acc
    }

    /// Outer grid of the measure, with the plus/minus symmetric halves of the
    /// root and infinity discs merged.
    pub fn outer_nodes(&self) -> Vec<MeasureNode> {
        let nt = self.settings.outer_angular;
        let rule = gl01(self.settings.outer_order);
        let mut out = Vec::new();
        for p in &self.patches {
            let half = !matches!(p.kind, PatchKind::Middle);
            let kmax = if half { nt / 2 } else { nt };
            let mult = if half { 2.0 } else { 1.0 };
            // the middle disc carries the holes around the roots and needs finer radial panels
            let np = if half { self.settings.outer_panels } else { 4 * self.settings.outer_panels };
            for w in self.breakpoints(p.kind, np).windows(2) {
                for &(t, wt) in &rule {
                    let uu = w[0] + (w[1] - w[0]) * t;
                    let r = p.radius * uu * uu;
                    let wr = wt * (w[1] - w[0]) * 2.0 * p.radius * uu * r * 2.0 * PI / nt as f64;
                    for k in 0..kmax {
                        let z = C::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / nt as f64);
                        let h = self.weight(p.kind, z);
                        if h == 0.0 {
                            continue;
                        }
                        out.push(MeasureNode { x: self.x_of(p.kind, z), weight: mult * wr * h, patch: p.kind });
                    }
                }
            }
        }
        out
    }

    /// int F(x) mu over the outer grid; evaluation order is fixed.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(C) -> f64 + Sync,
    {
        let nodes = self.outer_nodes();
        let vals: Vec<f64> = nodes.par_iter().map(|n| n.weight * f(n.x)).collect();
        vals.iter().sum()
    }

    /// int int log|x(p) - x(q)| mu(p) mu(q).
    pub fn double_integral(&self) -> f64 {
        self.integrate(|x| self.log_potential(x))
    }
}

/// chi(X_v) = 2g(2g+1) int lambda-hat mu = 2g(2g+1) int lambda mu - log|Delta| / 2,
/// with Delta = 2^{4g} disc(f).
pub fn chi_from_integral(g: usize, int_lambda: f64, log_abs_delta: f64) -> f64 {
    let g = g as f64;
    2.0 * g * (2.0 * g + 1.0) * int_lambda - log_abs_delta / 2.0
}
