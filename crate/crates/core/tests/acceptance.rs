//! Acceptance run: one PASS/FAIL line per criterion.

use num_traits::Signed;
use rug::{Complex, Float};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;
use superell::analytic::{self, arakelov::QuadratureSettings, LocalHeightContext};
use superell::cantor::{self, Engine};
use superell::curve::gap_sequence;
use superell::heights::{self, HeightConfig, Point};
use superell::mp;
use superell::poly::QPoly;
use superell::rat::{q, qf, Q};
use superell::schur_sigma;
use superell::{Place, SuperellipticCurve};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn curve(c: &[i64]) -> SuperellipticCurve {
    SuperellipticCurve::hyperelliptic(c).unwrap()
}

/// x^3 - x, x^3 + 2, x^5 + 1, x^5 - x
fn corpus() -> Vec<(&'static str, SuperellipticCurve)> {
    vec![
        ("x^3-x", curve(&[0, -1, 0, 1])),
        ("x^3+2", curve(&[2, 0, 0, 1])),
        ("x^5+1", curve(&[1, 0, 0, 0, 0, 1])),
        ("x^5-x", curve(&[0, -1, 0, 0, 0, 1])),
    ]
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn branch_identity() -> Outcome {
    let (mut cases, mut bad) = (0, Vec::new());
    for (name, c) in corpus() {
        let g = c.genus();
        for alpha in c.rational_roots() {
            for n in g.max(1)..=30 {
                let r = cantor::eval_at_branch(c.f(), &alpha, n).map_err(|e| e.to_string())?;
                cases += 1;
                if !r.equal {
                    bad.push(format!("{name} alpha={alpha} n={n}"));
                }
            }
        }
    }
    ensure(bad.is_empty(), format!("{cases} exact cases, mismatches: {bad:?}"))
}

fn catalan() -> Outcome {
    let mut bad = Vec::new();
    for l in 1..=12 {
        for m in 1..=12 {
            if !cantor::catalan_report(l, m).equal {
                bad.push((l, m));
            }
        }
    }
    ensure(bad.is_empty(), format!("144 determinants, mismatches: {bad:?}"))
}

fn leading_coefficients() -> Outcome {
    let fs = [QPoly::from_ints(&[0, -1, 0, 1]), QPoly::from_ints(&[1, 0, 0, 0, 0, 1]), QPoly::from_ints(&[0, -1, 0, 0, 0, 0, 0, 1])];
    let mut bad = Vec::new();
    let mut checked = 0;
    for (i, f) in fs.iter().enumerate() {
        let g = i + 1;
        for n in g..=20 {
            let lc = cantor::lc_hankel(f, n).map_err(|e| e.to_string())?;
            if lc != cantor::b_closed(n, g) {
                bad.push(format!("lc g={g} n={n}"));
            }
            if Q::from_integer(cantor::b0_hankel(n, g)) != cantor::b0_closed(n, g) {
                bad.push(format!("b0 g={g} n={n}"));
            }
            if (n + g + 1) % 2 == 0 && cantor::b_closed(n, g) != cantor::b0_closed(n, g) {
                bad.push(format!("b=b0 g={g} n={n}"));
            }
            if n <= 10 {
                let d = cantor::division_polynomial_with(f, n, Engine::Auto).map_err(|e| e.to_string())?;
                if d.b_n != lc {
                    bad.push(format!("psi lc g={g} n={n}"));
                }
            }
            checked += 1;
        }
    }
    ensure(bad.is_empty(), format!("{checked} (g, n) pairs, failures: {bad:?}"))
}

fn classical_cross_check() -> Outcome {
    let mut bad = Vec::new();
    for f in [QPoly::from_ints(&[0, -1, 0, 1]), QPoly::from_ints(&[2, 0, 0, 1]), QPoly::from_ints(&[3, -2, 1, 1])] {
        let cl = cantor::classical_division_g1(&f, 20);
        for (n, (p, has_y)) in cl.iter().enumerate().skip(1) {
            let c = cantor::division_polynomial_with(&f, n, Engine::Auto).map_err(|e| e.to_string())?;
            if *has_y != (n % 2 == 0) || !(c.psi == *p || c.psi == -p) {
                bad.push(format!("{f:?} n={n}"));
            }
        }
    }
    ensure(bad.is_empty(), format!("3 cubics, n <= 20, failures: {bad:?}"))
}

/// g * division_average at the branch point, i.e. (1/n^2) sum log|alpha - x_i|.
fn branch_average(f: &QPoly, alpha: &Q, n: usize) -> Result<f64, String> {
    let g = (f.degree().unwrap() - 1) / 2;
    let a = cantor::division_average(f, alpha, n, Place::Infinity, 128).map_err(|e| e.to_string())?;
    Ok(g as f64 * a.to_f64())
}

fn equidistribution() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (f, alpha, nmax) in [(QPoly::from_ints(&[0, -1, 0, 1]), q(1), 51), (QPoly::from_ints(&[1, 0, 0, 0, 0, 1]), q(-1), 30)] {
        let target = 0.5 * mp::log_abs_q(64, &f.derivative().eval(&alpha)).to_f64();
        let gap = |n: usize| -> Result<f64, String> { Ok((branch_average(&f, &alpha, n)? - target).abs()) };
        let big = gap(nmax)?;
        let small = gap(11)?;
        ok &= big <= 0.05 && big < small;
        lines.push(format!("deg {} n={nmax} gap {big:.3e} (n=11 {small:.3e})", f.degree().unwrap()));
    }
    ensure(ok, lines.join("; "))
}

fn period_invariants() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, c) in corpus() {
        let pm = analytic::periods(&c, 256).map_err(|e| e.to_string())?;
        let y = pm.im_tau_f64();
        let pd = match pm.g {
            1 => y[0][0] > 0.0,
            _ => y[0][0] > 0.0 && y[0][0] * y[1][1] - y[0][1] * y[1][0] > 0.0,
        };
        let leg = pm.legendre_modulus_error();
        ok &= pm.symmetry_residual <= 1e-30 && pd && leg <= 1e-25;
        lines.push(format!("{name}: sym {:.1e} leg {leg:.1e} pd {pd}", pm.symmetry_residual));
        if name == "x^3-x" {
            let d = Complex::with_val(pm.wp, &pm.tau[0][0] - Complex::with_val(pm.wp, (0, 1)));
            let e = mp::cabs_f64(&d);
            ok &= e <= 1e-25;
            lines.push(format!("|tau - i| {e:.1e}"));
        }
    }
    ensure(ok, lines.join("; "))
}

fn lambda_at_roots() -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, c) in corpus() {
        let g = c.genus();
        let ctx = LocalHeightContext::new(&c, 256).map_err(|e| e.to_string())?;
        let df = c.f().derivative();
        for (k, a) in ctx.periods().alphas.iter().enumerate() {
            let lam = ctx.lambda_branch(k).map_err(|e| e.to_string())?;
            let fp = mp::eval_q(&df, a);
            let target = Float::with_val(256, mp::cabs(&fp).ln() / (4 * g as u32));
            worst = worst.max(Float::with_val(256, lam - target).to_f64().abs());
        }
    }
    ensure(worst <= 1e-10, format!("max |lambda(alpha) - log|f'(alpha)|/4g| = {worst:.2e} over 16 branch points"))
}

fn quadrature() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, c) in [("x^3-x", curve(&[0, -1, 0, 1])), ("x^5+1", curve(&[1, 0, 0, 0, 0, 1]))] {
        let r = analytic::arakelov_report(&c, 256, QuadratureSettings::default(), true).map_err(|e| e.to_string())?;
        let mass = (r.mass - 1.0).abs();
        let fub = r.fubini_residual.unwrap_or(f64::INFINITY);
        let roots = (r.root_lambda_sum - r.root_lambda_target).abs();
        let roots_sigma = (r.root_lambda_sum_sigma.unwrap_or(f64::INFINITY) - r.root_lambda_target).abs();
        ok &= mass <= 1e-8 && fub <= 1e-6 && roots <= 1e-8 && roots_sigma <= 1e-8;
        lines.push(format!("{name}: mass {mass:.1e} fubini {fub:.1e} roots {roots:.1e}/{roots_sigma:.1e}"));
    }
    ensure(ok, lines.join("; "))
}

fn division_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (c, betas) in [(curve(&[0, -1, 0, 1]), [q(2), qf(-1, 3)]), (curve(&[2, 0, 0, 1]), [q(-1), qf(17, 4)])] {
        let ctx = LocalHeightContext::new(&c, 256).map_err(|e| e.to_string())?;
        for b in &betas {
            for n in [3, 5, 7] {
                let r = heights::identity_check_g1(&ctx, &c, b, n, 256).map_err(|e| e.to_string())?;
                worst = worst.max(r.residual.abs());
                count += 1;
            }
        }
    }
    ensure(worst < 1e-8, format!("{count} residuals, max {worst:.2e}"))
}

fn exact_sqrt(r: &Q) -> Option<Q> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    let s = Q::new(n, d);
    (&s * &s == *r).then_some(s)
}

fn canonical_heights() -> Outcome {
    let e1 = curve(&[0, -1, 0, 1]);
    let e2 = curve(&[2, 0, 0, 1]);
    let x3 = heights::x_multiple_g1(e2.f(), &q(-1), 3).ok_or("no 3P")?;
    let y3 = exact_sqrt(&e2.f().eval(&x3)).ok_or("3P not rational")?;
    let pts = [
        (&e1, Point::Affine(q(1), q(0))),
        (&e1, Point::Affine(q(0), q(0))),
        (&e2, Point::Affine(q(-1), q(1))),
        (&e2, Point::Affine(qf(17, 4), qf(71, 8))),
        (&e2, Point::Affine(x3, y3)),
    ];
    let cfg = HeightConfig::default();
    let mut lines = Vec::new();
    let mut worst: f64 = 0.0;
    for (c, p) in &pts {
        let r = heights::canonical_height(c, p, &cfg).map_err(|e| e.to_string())?;
        let d = r.difference.ok_or("no oracle")?;
        worst = worst.max(d.abs());
        lines.push(format!("{}: h {:.6} diff {d:.1e} unc {:.1e}", r.point, r.height, r.uncertainty));
    }
    let mut rows = 0;
    let mut exact = true;
    for beta in [q(-1), qf(17, 4)] {
        let t = heights::theorem_b_table(&e2, &beta, &[Place::Infinity, Place::Prime(2), Place::Prime(3)], &[3, 5, 7], 128)
            .map_err(|e| e.to_string())?;
        for r in &t.product {
            rows += 1;
            exact &= r.exact && r.total.abs() < 1e-9;
        }
    }
    lines.push(format!("{rows} product rows exact: {exact}"));
    ensure(worst <= 5e-2 && exact && rows > 0, lines.join("; "))
}

fn divpoly_heights() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, c) in [("x^3-x", curve(&[0, -1, 0, 1])), ("x^5+1", curve(&[1, 0, 0, 0, 0, 1]))] {
        let mut vals = Vec::new();
        for n in 10..=30 {
            let d = cantor::division_polynomial(&c, n).map_err(|e| e.to_string())?;
            vals.push((n, cantor::divpoly_height(&d) / (n * n) as f64));
        }
        let lo = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let hi = vals.iter().map(|v| v.1).fold(0.0, f64::max);
        ok &= lo > 0.0 && hi <= 5.0 * lo;
        for (n, v) in &vals {
            println!("    h(psi_{n})/n^2 {name:<6} {v:.6}");
        }
        lines.push(format!("{name}: band [{lo:.4}, {hi:.4}] ratio {:.2}", hi / lo));
    }
    ensure(ok, lines.join("; "))
}

fn sigma_suite() -> Outcome {
    let s = schur_sigma::sigma_polynomial(2, 3).map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    if s.poly != superell::mpoly::MPoly::var(1, 0) {
        bad.push("sigma_{2,3} != z1".to_string());
    }
    if schur_sigma::a_polynomial(&s) != QPoly::x() {
        bad.push("a(u) != u".to_string());
    }
    let pairs = schur_sigma::degree_pairs(5);
    let mut substituted = 0;
    for &(n, m) in &pairs {
        let s = schur_sigma::sigma_polynomial(n, m).map_err(|e| e.to_string())?;
        let w = ((n * n - 1) as usize * (m * m - 1)) / 24;
        if s.poly.is_zero() || s.poly.weighted_degree(&s.weights) != Some(w) {
            bad.push(format!("weight ({n},{m})"));
        }
        if s.g <= 4 {
            let gs = gap_sequence(n, m).map_err(|e| e.to_string())?;
            let lhs = schur_sigma::schur_via_complete(&gs.partition, s.g).map_err(|e| e.to_string())?;
            if s.substitute_power_sums_x() != lhs {
                bad.push(format!("substitution ({n},{m})"));
            }
            substituted += 1;
        }
    }
    ensure(bad.is_empty(), format!("{} pairs, {substituted} expanded, failures: {bad:?}", pairs.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("branch-point identity", branch_identity),
        ("Catalan Hankel identity", catalan),
        ("leading coefficients", leading_coefficients),
        ("classical cross-check", classical_cross_check),
        ("equidistribution at a branch point", equidistribution),
        ("period-matrix invariants", period_invariants),
        ("local height at ramification points", lambda_at_roots),
        ("quadrature consistency", quadrature),
        ("g=1 division identity", division_identity),
        ("heights against the elliptic oracle", canonical_heights),
        ("division-polynomial height band", divpoly_heights),
        ("sigma polynomial suite", sigma_suite),
    ];
    let filter: Option<Vec<usize>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let k = i + 1;
        if filter.as_ref().is_some_and(|f| !f.contains(&k)) {
            continue;
        }
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("criterion {k:>2} PASS {name} ({secs:.1} s): {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {k:>2} FAIL {name} ({secs:.1} s): {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

