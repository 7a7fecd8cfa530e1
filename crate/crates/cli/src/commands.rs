//! One function per subcommand; each fronts a single library operation.

use crate::output::{f, render_csv, render_json, Output, Table};
use crate::{Command, Format, PointArgs, RunArgs};
use serde_json::{json, Value};
use std::fs;
use std::path::Path;
use superell::analytic::{self, LocalHeightContext, QuadratureSettings};
use superell::cantor::{self, cache::PsiCache};
use superell::curve::{self, SuperellipticCurve};
use superell::format;
use superell::heights::{self, HeightConfig, Point};
use superell::rat::{self, Q};
use superell::{schur_sigma, Error, Place};

pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl<E: Into<Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Compute(e.into())
    }
}

type R<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> R<T> {
    Err(CliError::Usage(msg.into()))
}

struct Ctx<'a> {
    run: &'a RunArgs,
}

impl Ctx<'_> {
    fn curve(&self) -> R<SuperellipticCurve> {
        let Some(path) = &self.run.curve else {
            return usage("--curve is required");
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        SuperellipticCurve::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    fn hyperelliptic(&self) -> R<SuperellipticCurve> {
        let c = self.curve()?;
        if !c.is_hyperelliptic() {
            return usage("this command needs N = 2 and deg f odd");
        }
        Ok(c)
    }

    fn n_at_least(&self, name: &str, n: usize, g: usize) -> R<usize> {
        if n < g {
            return usage(format!("{name} = {n} is below the genus {g}"));
        }
        Ok(n)
    }

    fn places(&self) -> R<Vec<Place>> {
        if self.run.place.is_empty() {
            return Ok(vec![Place::Infinity]);
        }
        self.run
            .place
            .iter()
            .map(|s| s.parse::<Place>().map_err(|e| CliError::Usage(e.to_string())))
            .collect()
    }

    fn prec(&self) -> u32 {
        self.run.precision
    }
}

fn parse_q(s: &str) -> R<Q> {
    rat::parse_rational(s).map_err(|e| CliError::Usage(format!("'{s}': {e}")))
}

fn parse_point(a: &PointArgs) -> R<(Q, Option<Q>)> {
    match (&a.point, &a.x) {
        (Some(p), None) => {
            let Some((x, y)) = p.split_once(',') else {
                return usage(format!("point '{p}' must be 'x,y'"));
            };
            Ok((parse_q(x)?, Some(parse_q(y)?)))
        }
        (None, Some(x)) => Ok((parse_q(x)?, None)),
        _ => usage("give exactly one of --point and --x"),
    }
}

fn check_cache_dir(dir: &Path) -> R<PsiCache> {
    let cache = PsiCache::new(dir).map_err(|e| CliError::Usage(format!("cache {}: {e}", dir.display())))?;
    let probe = dir.join(format!(".probe.{}", std::process::id()));
    fs::write(&probe, b"").map_err(|e| CliError::Usage(format!("cache {} not writable: {e}", dir.display())))?;
    let _ = fs::remove_file(probe);
    Ok(cache)
}

pub fn run(run: &RunArgs, cmd: Command) -> R<()> {
    if run.precision < 64 {
        return usage(format!("precision {} is below 64 bits", run.precision));
    }
    if let Some(w) = run.workers {
        if w == 0 {
            return usage("--workers must be positive");
        }
        // a second initialisation in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let ctx = Ctx { run };
    let out = match cmd {
        Command::Gaps { big_n, m } => cmd_gaps(big_n, m)?,
        Command::SigmaPoly { big_n, m } => cmd_sigma_poly(big_n, m)?,
        Command::Divpoly => cmd_divpoly(&ctx)?,
        Command::EvalBranch => cmd_eval_branch(&ctx)?,
        Command::Catalan { l_max, m_max } => cmd_catalan(l_max, m_max)?,
        Command::Equidist { beta, n_list } => cmd_equidist(&ctx, &beta, n_list)?,
        Command::Periods => cmd_periods(&ctx)?,
        Command::Lambda { at } => cmd_lambda(&ctx, &at)?,
        Command::Height { at, oracle_steps } => cmd_height(&ctx, &at, oracle_steps)?,
        Command::Chi { report, fine } => cmd_chi(&ctx, report, fine)?,
        Command::Identity { beta, n_list } => cmd_identity(&ctx, &beta, &n_list)?,
    };
    let bytes = match run.format {
        Format::Json => render_json(&out),
        Format::Csv => render_csv(&out),
    };
    match &run.out {
        Some(p) => {
            let tmp = p.with_extension(format!("tmp.{}", std::process::id()));
            fs::write(&tmp, &bytes).map_err(Error::from)?;
            fs::rename(&tmp, p).map_err(Error::from)?;
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(Error::from)?;
        }
    }
    Ok(())
}

fn cmd_gaps(big_n: u32, m: usize) -> R<Output> {
    let gs = curve::gap_sequence(big_n, m)?;
    let mut t = Table::new(&["index", "gap"]);
    for (i, w) in gs.gaps.iter().enumerate() {
        t.push(vec![(i + 1).to_string(), w.to_string()]);
    }
    let json = json!({"gaps": gs.gaps, "genus": gs.gaps.len(), "partition": gs.partition});
    Ok(Output { json, table: t })
}

fn cmd_sigma_poly(big_n: u32, m: usize) -> R<Output> {
    let s = schur_sigma::sigma_polynomial(big_n, m)?;
    let a = schur_sigma::a_polynomial(&s);
    let mut json = s.to_json();
    json["N"] = json!(big_n);
    json["m"] = json!(m);
    json["total_weight"] = json!(s.total_weight);
    json["a"] = json!(a.coeffs().iter().map(rat::fmt_rational).collect::<Vec<_>>());
    let mut t = Table::new(&["exponents", "coeff"]);
    for (e, c) in s.poly.terms() {
        let exps: Vec<String> = e.iter().map(|k| k.to_string()).collect();
        t.push(vec![exps.join(" "), rat::fmt_rational(c)]);
    }
    Ok(Output { json, table: t })
}

fn cmd_divpoly(ctx: &Ctx) -> R<Output> {
    let c = ctx.hyperelliptic()?;
    let Some(n) = ctx.run.n else {
        return usage("--n is required");
    };
    let n = ctx.n_at_least("n", n, c.genus())?;
    let d = match &ctx.run.cache {
        Some(dir) => check_cache_dir(dir)?.get_or_compute(&c, n)?,
        None => cantor::division_polynomial(&c, n)?,
    };
    let h = cantor::divpoly_height(&d);
    let coeffs: Vec<String> = d.psi.coeffs().iter().map(rat::fmt_rational).collect();
    let mut t = Table::new(&["power", "coeff"]);
    for (i, s) in coeffs.iter().enumerate() {
        t.push(vec![i.to_string(), s.clone()]);
    }
    let json = json!({
        "n": n,
        "g": d.g,
        "deg": d.degree(),
        "b": rat::fmt_rational(&d.b_n),
        "same_parity": d.same_parity,
        "invariants_ok": d.check_invariants(),
        "height": h,
        "height_over_n2": h / (n * n) as f64,
        "coeffs": coeffs,
    });
    Ok(Output { json, table: t })
}

fn cmd_eval_branch(ctx: &Ctx) -> R<Output> {
    let c = ctx.hyperelliptic()?;
    let g = c.genus();
    let ns: Vec<usize> = match (ctx.run.n, ctx.run.n_max) {
        (Some(n), _) => vec![ctx.n_at_least("n", n, g)?],
        (None, Some(m)) => (g..=ctx.n_at_least("n-max", m, g)?).collect(),
        (None, None) => (g..=30).collect(),
    };
    let mut t = Table::new(&["alpha", "n", "lhs", "rhs", "equal"]);
    let mut rows = Vec::new();
    for alpha in c.rational_roots() {
        for &n in &ns {
            let r = cantor::eval_at_branch(c.f(), &alpha, n)?;
            let (a, l, rr) = (rat::fmt_rational(&alpha), rat::fmt_rational(&r.lhs), rat::fmt_rational(&r.rhs));
            t.push(vec![a.clone(), n.to_string(), l.clone(), rr.clone(), r.equal.to_string()]);
            rows.push(json!({"alpha": a, "n": n, "lhs": l, "rhs": rr, "equal": r.equal}));
        }
    }
    let all = rows.iter().all(|r| r["equal"] == json!(true));
    Ok(Output { json: json!({"rows": rows, "all_equal": all}), table: t })
}

fn cmd_catalan(l_max: usize, m_max: usize) -> R<Output> {
    let mut t = Table::new(&["l", "m", "det", "product", "equal"]);
    let mut rows = Vec::new();
    for l in 1..=l_max {
        for m in 1..=m_max {
            let r = cantor::catalan_report(l, m);
            t.push(vec![l.to_string(), m.to_string(), r.det.clone(), r.product.clone(), r.equal.to_string()]);
            rows.push(serde_json::to_value(&r).expect("serializable"));
        }
    }
    Ok(Output { json: json!({ "rows": rows }), table: t })
}

fn cmd_equidist(ctx: &Ctx, beta: &str, n_list: Vec<usize>) -> R<Output> {
    let c = ctx.hyperelliptic()?;
    let beta = parse_q(beta)?;
    let g = c.genus();
    let ns = if n_list.is_empty() {
        let m = ctx.n_at_least("n-max", ctx.run.n_max.unwrap_or(20), g)?;
        (g..=m).collect()
    } else {
        n_list
    };
    let table = heights::theorem_b_table(&c, &beta, &ctx.places()?, &ns, ctx.prec())?;
    let mut t = Table::new(&["place", "n", "average", "target", "gap"]);
    for r in &table.rows {
        t.push(vec![r.place.to_string(), r.n.to_string(), f(r.average), f(r.target), f(r.gap)]);
    }
    Ok(Output { json: serde_json::to_value(&table).expect("serializable"), table: t })
}

fn cmd_periods(ctx: &Ctx) -> R<Output> {
    let c = ctx.hyperelliptic()?;
    let pm = analytic::periods(&c, ctx.prec())?;
    let json = pm.to_json();
    let mut t = Table::new(&["matrix", "i", "j", "re", "im"]);
    for name in ["omega1", "omega2", "eta1", "eta2", "tau"] {
        if let Value::Array(rows) = &json[name] {
            for (i, row) in rows.iter().enumerate() {
                for (j, z) in row.as_array().into_iter().flatten().enumerate() {
                    let part = |k: usize| z[k].as_str().unwrap_or_default().to_string();
                    t.push(vec![name.to_string(), i.to_string(), j.to_string(), part(0), part(1)]);
                }
            }
        }
    }
    Ok(Output { json, table: t })
}

fn height_config(ctx: &Ctx, oracle_steps: usize) -> HeightConfig {
    HeightConfig { precision: ctx.prec(), n_cap: ctx.run.n_max.unwrap_or(HeightConfig::default().n_cap), oracle_steps }
}

fn cmd_lambda(ctx: &Ctx, at: &PointArgs) -> R<Output> {
    let c = ctx.hyperelliptic()?;
    let (x, y) = parse_point(at)?;
    if let Some(y) = &y {
        if !Point::Affine(x.clone(), y.clone()).on_curve(&c) {
            return Err(heights::HeightError::NotOnCurve.into());
        }
    }
    let cfg = height_config(ctx, 0);
    ctx.n_at_least("n-max", cfg.n_cap, c.genus())?;
    let mut t = Table::new(&["place", "method", "n", "n_v", "lambda", "contribution", "uncertainty"]);
    let mut rows = Vec::new();
    for place in ctx.places()? {
        let r = heights::local_height(&c, &x, y.as_ref(), place, &cfg)?;
        let mut v = serde_json::to_value(&r).expect("serializable");
        if place.is_archimedean() && c.genus() <= 2 {
            // full working precision for the sigma value
            let h = LocalHeightContext::new(&c, ctx.prec())?;
            let lam = heights::lambda_at_x(&h, c.f(), &x, ctx.prec())?;
            v["lambda"] = json!(format::float_full(&lam));
        }
        t.push(method_row(&r));
        rows.push(v);
    }
    Ok(Output { json: json!({"x": rat::fmt_rational(&x), "places": rows}), table: t })
}

fn method_row(r: &heights::LocalHeightReport) -> Vec<String> {
    let (m, n) = match &r.method {
        heights::Method::SigmaAnalytic => ("sigma-analytic", String::new()),
        heights::Method::GoodReductionFormula => ("good-reduction-formula", String::new()),
        heights::Method::DivisionAveraging { n } => ("division-averaging", n.to_string()),
    };
    vec![r.place.to_string(), m.to_string(), n, f(r.n_v), f(r.lambda), f(r.contribution), f(r.uncertainty)]
}

fn cmd_height(ctx: &Ctx, at: &PointArgs, oracle_steps: usize) -> R<Output> {
    let c = ctx.hyperelliptic()?;
    let point = match (&at.point, &at.x) {
        (Some(p), None) if p.trim() == "o" => Point::O,
        (Some(_), None) => {
            let (x, y) = parse_point(at)?;
            Point::Affine(x, y.expect("point has y"))
        }
        _ => return usage("--point 'x,y' (or 'o') is required"),
    };
    let cfg = height_config(ctx, oracle_steps);
    ctx.n_at_least("n-max", cfg.n_cap, c.genus())?;
    let r = heights::canonical_height(&c, &point, &cfg)?;
    let mut t = Table::new(&["place", "method", "n", "n_v", "lambda", "contribution", "uncertainty"]);
    for p in &r.places {
        t.push(method_row(p));
    }
    Ok(Output { json: serde_json::to_value(&r).expect("serializable"), table: t })
}

fn cmd_chi(ctx: &Ctx, report: bool, fine: bool) -> R<Output> {
    let c = ctx.hyperelliptic()?;
    let settings = if fine { QuadratureSettings::fine() } else { QuadratureSettings::default() };
    let chi = analytic::chi_invariant(&c, ctx.prec(), settings)?;
    let mut json = serde_json::to_value(&chi).expect("serializable");
    let mut t = Table::new(&["key", "value"]);
    for k in ["chi", "int_lambda", "log_abs_delta", "omega_term", "outer_mass"] {
        t.push(vec![k.to_string(), f(json[k].as_f64().unwrap_or(f64::NAN))]);
    }
    t.push(vec!["nonnegative".into(), chi.nonnegative.to_string()]);
    if report {
        let r = analytic::arakelov_report(&c, ctx.prec(), settings, c.genus() <= 2)?;
        json["quadrature"] = serde_json::to_value(&r).expect("serializable");
    }
    Ok(Output { json, table: t })
}

fn cmd_identity(ctx: &Ctx, beta: &str, n_list: &[usize]) -> R<Output> {
    let c = ctx.hyperelliptic()?;
    let beta = parse_q(beta)?;
    if c.genus() != 1 {
        return Err(heights::HeightError::GenusNotOne(c.genus()).into());
    }
    let h = LocalHeightContext::new(&c, ctx.prec())?;
    let mut t = Table::new(&["n", "log_a", "half_sum", "lambda_np", "lambda_p", "residual"]);
    let mut rows = Vec::new();
    for &n in n_list {
        let n = ctx.n_at_least("n", n, 1)?;
        let r = heights::identity_check_g1(&h, &c, &beta, n, ctx.prec())?;
        t.push(vec![n.to_string(), f(r.log_a), f(r.half_sum), f(r.lambda_np), f(r.lambda_p), f(r.residual)]);
        rows.push(serde_json::to_value(&r).expect("serializable"));
    }
    Ok(Output { json: json!({"beta": rat::fmt_rational(&beta), "rows": rows}), table: t })
}
