//! Canonical heights h(p) = sum_v n_v lambda_v(p) on y^2 = f(x) over Q.
//!
//! lambda_v comes from sigma at the real place, from the good-reduction
//! formula at most primes, and from averages over division points
//! (psi_n values) elsewhere. Contributions are reported n_v-weighted, i.e.
//! in units where the p-adic term of a rational r is -ord_p(r) log p.

use crate::analytic::{AnalyticError, ArakelovMeasure, LocalHeightContext, QuadratureSettings};
use crate::cantor::{self, CantorError};
use crate::curve::{discriminant, CurveError, SuperellipticCurve};
use crate::mp;
use crate::place::Place;
use crate::rat::{self, Q, Z};
use crate::schur_sigma::{self, SchurError};
use num_traits::{One, Signed, Zero};
use rug::{Float, Rational};
use rustfft::num_complex::Complex64 as C;
use serde::Serialize;
use thiserror::Error;

/// y^N = f(x)
const N: u32 = 2;

/// Trial-division bound when enumerating the support of a height.
const FACTOR_BOUND: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeightError {
    #[error("{0} is a prime of bad reduction")]
    BadReductionPrime(u64),
    #[error("n = {n} is not admissible at {place}")]
    NotInTSet { n: usize, place: Place },
    #[error("point is 2-torsion")]
    TwoTorsionPoint,
    #[error("[{0}]p is the origin")]
    TorsionCollision(usize),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("expected an elliptic curve, got genus {0}")]
    GenusNotOne(usize),
    #[error("curve must have integral coefficients")]
    NonIntegralCurve,
    #[error("cannot factor {0}")]
    Factorization(String),
    #[error("no admissible n up to {0}")]
    NoAdmissibleN(usize),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Schur(#[from] SchurError),
}

/// A rational point, or the point o at infinity.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    O,
    Affine(Q, Q),
}

impl Point {
    pub fn on_curve(&self, c: &SuperellipticCurve) -> bool {
        match self {
            Point::O => true,
            Point::Affine(x, y) => num_traits::pow(y.clone(), c.exponent() as usize) == c.f().eval(x),
        }
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Point::O => write!(f, "o"),
            Point::Affine(x, y) => write!(f, "({}, {})", rat::fmt_rational(x), rat::fmt_rational(y)),
        }
    }
}

/// n_v: 1 at the real place, log p at p.
pub fn n_v(place: Place, prec: u32) -> Float {
    match place {
        Place::Infinity => Float::with_val(prec, 1),
        Place::Prime(p) => Float::with_val(prec, p).ln(),
    }
}

fn require_integral(c: &SuperellipticCurve) -> Result<(), HeightError> {
    c.require_hyperelliptic()?;
    if c.is_integral() {
        Ok(())
    } else {
        Err(HeightError::NonIntegralCurve)
    }
}

fn disc_integer(c: &SuperellipticCurve) -> Z {
    discriminant(c).0.to_integer()
}

fn is_good_prime(c: &SuperellipticCurve, p: u64) -> bool {
    p != 2 && !(disc_integer(c) % Z::from(p)).is_zero()
}

/// n_v lambda_p(x) = (1/N) max(0, -ord_p x) log p, for p not dividing 2 disc(f).
pub fn lambda_good_reduction(c: &SuperellipticCurve, p: u64, x: &Q, prec: u32) -> Result<Float, HeightError> {
    require_integral(c)?;
    if !is_good_prime(c, p) {
        return Err(HeightError::BadReductionPrime(p));
    }
    let k = (-rat::ord(x, p)).max(0);
    Ok(Float::with_val(prec, k * n_v(Place::Prime(p), prec)) / N)
}

fn residue_char(place: Place) -> u64 {
    match place {
        Place::Infinity => 0,
        Place::Prime(p) => p,
    }
}

/// n_v lambda_v(beta) estimated by half the division average at index n.
pub fn lambda_dpa(c: &SuperellipticCurve, beta: &Q, place: Place, n: usize, prec: u32) -> Result<Float, HeightError> {
    c.require_hyperelliptic()?;
    let g = c.genus();
    if n < g || !cantor::t_set_contains(residue_char(place), g, n) {
        return Err(HeightError::NotInTSet { n, place });
    }
    let v = cantor::psi_value(c.f(), n, beta)?;
    dpa_from_value(c, beta, n, &v, place, prec)
}

fn dpa_from_value(c: &SuperellipticCurve, beta: &Q, n: usize, v: &Q, place: Place, prec: u32) -> Result<Float, HeightError> {
    if v.is_zero() {
        return Err(HeightError::NotInTSet { n, place });
    }
    let g = c.genus();
    let s = cantor::division_sum_from_value(c.f(), beta, n, v, place, prec)?;
    Ok(Float::with_val(prec, s / (g * n * n) as u32) / N)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    SigmaAnalytic,
    GoodReductionFormula,
    DivisionAveraging { n: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalHeightReport {
    pub place: Place,
    pub n_v: f64,
    pub lambda: f64,
    /// n_v lambda
    pub contribution: f64,
    pub method: Method,
    /// spread of the last three averages for DPA rows, else 0
    pub uncertainty: f64,
    /// the DPA value at the real place, when sigma was used
    pub cross_check: Option<f64>,
    /// (n, n_v lambda at n) for DPA rows
    pub sequence: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NtHeight {
    pub value: f64,
    pub error: f64,
    pub torsion: bool,
    /// (1/2) 4^-k h(x(2^k p)) for k = 0, 1, ...
    pub sequence: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GlobalHeightReport {
    pub point: String,
    pub places: Vec<LocalHeightReport>,
    pub height: f64,
    pub uncertainty: f64,
    pub oracle: Option<NtHeight>,
    pub difference: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct HeightConfig {
    pub precision: u32,
    /// largest n used for division averages
    pub n_cap: usize,
    /// duplication steps for the elliptic oracle; 0 disables it
    pub oracle_steps: usize,
}

impl Default for HeightConfig {
    fn default() -> Self {
        HeightConfig { precision: 256, n_cap: 31, oracle_steps: 8 }
    }
}

/// Primes that can carry a non-zero local height: 2, those dividing disc(f)
/// and those dividing the denominators of `xs`.
pub fn support_primes<'a>(c: &SuperellipticCurve, xs: impl IntoIterator<Item = &'a Q>) -> Result<Vec<u64>, HeightError> {
    let mut out = vec![2u64];
    let mut add = |n: &Z| -> Result<(), HeightError> {
        let (ps, rest) = rat::small_prime_factors(n, FACTOR_BOUND);
        if rest > Z::one() {
            return Err(HeightError::Factorization(rest.to_string()));
        }
        out.extend(ps);
        Ok(())
    };
    add(&disc_integer(c))?;
    for x in xs {
        add(x.denom())?;
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// psi_n(beta) for g <= n <= cap.
fn psi_values(c: &SuperellipticCurve, beta: &Q, cap: usize) -> Result<Vec<(usize, Q)>, HeightError> {
    (c.genus()..=cap).map(|n| Ok((n, cantor::psi_value(c.f(), n, beta)?))).collect()
}

struct DpaEstimate {
    n: usize,
    value: Float,
    uncertainty: f64,
    sequence: Vec<(usize, f64)>,
}

/// Averages over the parity class of the largest admissible n. At primes the
/// value is extrapolated with an error term c/n^2 from the last two members;
/// at the real place the error oscillates and the last value is kept. The
/// uncertainty is the larger of the extrapolation step and the spread of the
/// last three raw values.
fn dpa_estimate(c: &SuperellipticCurve, beta: &Q, psi: &[(usize, Q)], place: Place, prec: u32) -> Result<DpaEstimate, HeightError> {
    let g = c.genus();
    let ell = residue_char(place);
    let admissible: Vec<&(usize, Q)> =
        psi.iter().filter(|(n, v)| !v.is_zero() && cantor::t_set_contains(ell, g, *n)).collect();
    let last = admissible.last().ok_or(HeightError::NoAdmissibleN(psi.last().map_or(0, |p| p.0)))?.0;
    let mut sequence = Vec::new();
    let mut raw = Vec::new();
    for (n, v) in admissible.into_iter().filter(|(n, _)| n % 2 == last % 2) {
        let val = dpa_from_value(c, beta, *n, v, place, prec)?;
        sequence.push((*n, val.to_f64()));
        raw.push((*n, val));
    }
    let k = raw.len();
    if k < 2 || place.is_archimedean() {
        let tail = &sequence[k.saturating_sub(3)..];
        let spread = if k < 2 {
            f64::INFINITY
        } else {
            tail.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max) - tail.iter().map(|t| t.1).fold(f64::INFINITY, f64::min)
        };
        let value = raw.pop().expect("non-empty").1;
        return Ok(DpaEstimate { n: last, value, uncertainty: spread, sequence });
    }
    let (n1, v1) = &raw[k - 2];
    let (n2, v2) = &raw[k - 1];
    let (s1, s2) = ((n1 * n1) as u32, (n2 * n2) as u32);
    let value = Float::with_val(prec, Float::with_val(prec, v2 * s2) - Float::with_val(prec, v1 * s1)) / (s2 - s1);
    let step = Float::with_val(prec, &value - v2).to_f64().abs();
    let tail = &sequence[k.saturating_sub(3)..];
    let hi = tail.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    Ok(DpaEstimate { n: last, value, uncertainty: step.max(hi - lo), sequence })
}

/// lambda_infinity at a point with rational x (y = sqrt f(x), either sheet).
pub fn lambda_at_x(ctx: &LocalHeightContext, f: &crate::poly::QPoly, x: &Q, prec: u32) -> Result<Float, HeightError> {
    let fx = f.eval(x);
    let xm = mp::cq(prec, x);
    if fx.is_zero() {
        let k = ctx
            .periods()
            .alphas
            .iter()
            .enumerate()
            .map(|(k, a)| (k, mp::cabs(&rug::Complex::with_val(prec, a - &xm)).to_f64()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|t| t.0)
            .expect("roots");
        return Ok(ctx.lambda_branch(k)?);
    }
    let y = mp::cq(prec, &fx).sqrt();
    Ok(ctx.lambda_point(&xm, &y)?)
}

fn place_report(c: &SuperellipticCurve, x: &Q, y: Option<&Q>, place: Place, psi: &[(usize, Q)], prec: u32) -> Result<LocalHeightReport, HeightError> {
    let nv = n_v(place, prec).to_f64();
    let report = |v: f64, method, uncertainty, cross_check, sequence| LocalHeightReport {
        place,
        n_v: nv,
        lambda: v / nv,
        contribution: v,
        method,
        uncertainty,
        cross_check,
        sequence,
    };
    match place {
        Place::Infinity if c.genus() <= 2 => {
            let ctx = LocalHeightContext::new(c, prec)?;
            let lam = match y {
                Some(y) if !y.is_zero() => ctx.lambda_point(&mp::cq(prec, x), &mp::cq(prec, y))?,
                _ => lambda_at_x(&ctx, c.f(), x, prec)?,
            };
            let cross = dpa_estimate(c, x, psi, place, prec).ok().map(|d| d.value.to_f64());
            Ok(report(lam.to_f64(), Method::SigmaAnalytic, 0.0, cross, vec![]))
        }
        Place::Prime(p) if is_good_prime(c, p) => {
            let v = lambda_good_reduction(c, p, x, prec)?.to_f64();
            Ok(report(v, Method::GoodReductionFormula, 0.0, None, vec![]))
        }
        _ => {
            let d = dpa_estimate(c, x, psi, place, prec)?;
            Ok(report(d.value.to_f64(), Method::DivisionAveraging { n: d.n }, d.uncertainty, None, d.sequence))
        }
    }
}

/// n_v lambda_v at a point with x-coordinate x, by the method that applies at
/// `place`; y picks the sheet when given (lambda is even, so only x matters).
pub fn local_height(c: &SuperellipticCurve, x: &Q, y: Option<&Q>, place: Place, cfg: &HeightConfig) -> Result<LocalHeightReport, HeightError> {
    require_integral(c)?;
    let needs_psi = match place {
        Place::Infinity => true,
        Place::Prime(p) => !is_good_prime(c, p),
    };
    let psi = if needs_psi { psi_values(c, x, cfg.n_cap)? } else { vec![] };
    place_report(c, x, y, place, &psi, cfg.precision)
}

pub fn canonical_height(c: &SuperellipticCurve, point: &Point, cfg: &HeightConfig) -> Result<GlobalHeightReport, HeightError> {
    require_integral(c)?;
    if !point.on_curve(c) {
        return Err(HeightError::NotOnCurve);
    }
    let (x, y) = match point {
        Point::O => {
            return Ok(GlobalHeightReport {
                point: point.to_string(),
                places: vec![],
                height: 0.0,
                uncertainty: 0.0,
                oracle: None,
                difference: None,
            })
        }
        Point::Affine(x, y) => (x, y),
    };
    let prec = cfg.precision;
    let g = c.genus();
    let primes = support_primes(c, [x])?;
    let psi = psi_values(c, x, cfg.n_cap)?;
    let mut places = vec![place_report(c, x, Some(y), Place::Infinity, &psi, prec)?];
    for p in primes {
        places.push(place_report(c, x, Some(y), Place::Prime(p), &psi, prec)?);
    }
    let height = places.iter().map(|r| r.contribution).sum();
    let uncertainty = places.iter().map(|r| r.uncertainty).sum();
    let oracle = if g == 1 && cfg.oracle_steps > 0 {
        match nt_height_elliptic(c, x, cfg.oracle_steps) {
            Ok(h) => Some(h),
            Err(HeightError::TwoTorsionPoint) => {
                Some(NtHeight { value: 0.0, error: 0.0, torsion: true, sequence: vec![] })
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let difference = oracle.as_ref().map(|o| height - o.value);
    Ok(GlobalHeightReport { point: point.to_string(), places, height, uncertainty, oracle, difference })
}

fn log_height_rational(r: &Rational) -> f64 {
    let m = if r.numer().clone().abs() > *r.denom() { r.numer().clone().abs() } else { r.denom().clone() };
    Float::with_val(64, &m).ln().to_f64()
}

/// Neron–Tate height on y^2 = x^3 + a x^2 + b x + c, normalised as
/// (1/2) lim 4^-k h(x(2^k p)) with h(a/b) = log max(|a|, |b|).
pub fn nt_height_elliptic(c: &SuperellipticCurve, x: &Q, k_max: usize) -> Result<NtHeight, HeightError> {
    c.require_hyperelliptic()?;
    if c.genus() != 1 {
        return Err(HeightError::GenusNotOne(c.genus()));
    }
    if c.f().eval(x).is_zero() {
        return Err(HeightError::TwoTorsionPoint);
    }
    let co: Vec<Rational> = c.f().coeffs().iter().map(mp::to_rational).collect();
    let (a6, a4, a2) = (&co[0], &co[1], &co[2]);
    let b2 = Rational::from(a2 * 4u32);
    let b4 = Rational::from(a4 * 2u32);
    let b6 = Rational::from(a6 * 4u32);
    let b8 = Rational::from(Rational::from(a2 * a6) * 4u32) - Rational::from(a4 * a4);
    let mut xk = mp::to_rational(x);
    let mut sequence = vec![log_height_rational(&xk) / 2.0];
    let mut torsion = false;
    for k in 1..=k_max {
        let x2 = Rational::from(&xk * &xk);
        let num = Rational::from(&x2 * &x2) - Rational::from(&b4 * &x2) - Rational::from(&b6 * &xk) * 2u32 - &b8;
        let den = Rational::from(Rational::from(&x2 * &xk) * 4u32)
            + Rational::from(&b2 * &x2)
            + Rational::from(Rational::from(&b4 * &xk) * 2u32)
            + &b6;
        if den == 0 {
            torsion = true;
            break;
        }
        xk = num / den;
        let scale = Float::with_val(64, Float::i_pow_u(4, k as u32));
        sequence.push(log_height_rational(&xk) / 2.0 / scale.to_f64());
    }
    if torsion {
        return Ok(NtHeight { value: 0.0, error: 0.0, torsion, sequence });
    }
    let k = sequence.len() - 1;
    let (value, error) = if k == 0 {
        (sequence[0], f64::INFINITY)
    } else {
        let r = (4.0 * sequence[k] - sequence[k - 1]) / 3.0;
        (r, (sequence[k] - sequence[k - 1]).abs())
    };
    Ok(NtHeight { value, error, torsion, sequence })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResidual {
    pub n: usize,
    pub log_a: f64,
    /// (1/2) sum over q in H_n, q != o, of log|x(p) - x(q)|
    pub half_sum: f64,
    pub lambda_np: f64,
    pub lambda_p: f64,
    pub residual: f64,
}

/// x([n]p) for x(p) = beta via x - psi_{n-1} psi_{n+1} / psi_n^2 (classical recurrence).
pub fn x_multiple_g1(f: &crate::poly::QPoly, beta: &Q, n: usize) -> Option<Q> {
    let psi = cantor::classical_division_g1(f, (n + 1).max(4));
    let fb = f.eval(beta);
    let val = |i: usize| -> (Q, bool) { (psi[i].0.eval(beta), psi[i].1) };
    let (a, fa) = val(n - 1);
    let (b, fbn) = val(n + 1);
    let (d, fd) = val(n);
    let four_f = &fb * Q::from_integer(Z::from(4));
    let mut num = &a * &b;
    if fa && fbn {
        num *= &four_f;
    }
    let mut den = &d * &d;
    if fd {
        den *= &four_f;
    }
    if den.is_zero() {
        return None;
    }
    Some(beta - num / den)
}

/// Residual of log|a(n)| + (1/2) sum_{q in H_n - o} log|x(p) - x(q)| + lambda(np) - n^2 lambda(p)
/// on an elliptic curve, at a point with x(p) = beta.
pub fn identity_check_g1(ctx: &LocalHeightContext, c: &SuperellipticCurve, beta: &Q, n: usize, prec: u32) -> Result<IdentityResidual, HeightError> {
    if c.genus() != 1 {
        return Err(HeightError::GenusNotOne(c.genus()));
    }
    let f = c.f();
    let xn = x_multiple_g1(f, beta, n).ok_or(HeightError::TorsionCollision(n))?;
    let a = schur_sigma::a_polynomial(&schur_sigma::sigma_polynomial(N, 3)?);
    let log_a = mp::log_abs_q(prec, &a.eval(&rat::q(n as i64)));
    let sum = match cantor::division_sum(f, beta, n, Place::Infinity, prec) {
        Ok(s) => s,
        Err(CantorError::ZeroEncountered(_)) => return Err(HeightError::TorsionCollision(n)),
        Err(e) => return Err(e.into()),
    };
    let half = Float::with_val(prec, sum / 2u32);
    let lnp = lambda_at_x(ctx, f, &xn, prec)?;
    let lp = lambda_at_x(ctx, f, beta, prec)?;
    let n2 = (n * n) as u32;
    let r = Float::with_val(prec, &log_a + &half) + &lnp - Float::with_val(prec, &lp * n2);
    Ok(IdentityResidual {
        n,
        log_a: log_a.to_f64(),
        half_sum: half.to_f64(),
        lambda_np: lnp.to_f64(),
        lambda_p: lp.to_f64(),
        residual: r.to_f64().abs(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremBRow {
    pub place: Place,
    pub n: usize,
    pub average: f64,
    pub target: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Exclusion {
    pub place: Option<Place>,
    pub n: usize,
    pub reason: String,
}

/// Product formula for the raw division sum R_n = psi_n(beta)^2 f(beta)^m / b(n)^2
/// (f'(beta) if f(beta) = 0): per-place terms n_v log|R_n|_v over the
/// real place, the listed primes, and the remaining cofactor.
#[derive(Clone, Debug, Serialize)]
pub struct ProductRow {
    pub n: usize,
    pub terms: Vec<(String, f64)>,
    pub total: f64,
    /// R_n = sign * cofactor * prod p^ord_p holds in Q
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremBTable {
    pub beta: String,
    pub weierstrass: bool,
    pub rows: Vec<TheoremBRow>,
    pub excluded: Vec<Exclusion>,
    pub product: Vec<ProductRow>,
}

fn raw_sum_value(f: &crate::poly::QPoly, g: usize, beta: &Q, n: usize, v: &Q) -> Q {
    let fb = f.eval(beta);
    let extra = if fb.is_zero() { f.derivative().eval(beta) } else { fb };
    let b = cantor::b_closed(n, g);
    let m = cantor::ramification_multiplicity(n, g);
    v * v * num_traits::pow(extra, m) / (&b * &b)
}

fn product_row(r: &Q, n: usize, primes: &[u64], prec: u32) -> ProductRow {
    let mut ps: Vec<u64> = primes.to_vec();
    for part in [r.numer(), r.denom()] {
        ps.extend(rat::small_prime_factors(part, 1000).0.into_iter().filter(|&p| p <= 1000));
    }
    ps.sort_unstable();
    ps.dedup();
    let mut total = mp::log_abs_q(prec, r);
    let mut terms = vec![("inf".to_string(), total.to_f64())];
    let mut rebuilt = Q::one();
    for &p in &ps {
        let o = rat::ord(r, p);
        if o == 0 {
            continue;
        }
        let t = Place::Prime(p).log_abs(prec, r);
        terms.push((p.to_string(), t.to_f64()));
        total += &t;
        let pz = Q::from_integer(Z::from(p));
        rebuilt *= if o > 0 { num_traits::pow(pz, o as usize) } else { num_traits::pow(pz.recip(), (-o) as usize) };
    }
    let cofactor = r.abs() / &rebuilt;
    let coprime = ps.iter().all(|&p| rat::ord(&cofactor, p) == 0);
    let rest = Float::with_val(prec, -mp::log_abs_q(prec, &cofactor));
    terms.push(("rest".to_string(), rest.to_f64()));
    total += &rest;
    let exact = coprime && &cofactor * &rebuilt == r.abs();
    ProductRow { n, terms, total: total.to_f64(), exact }
}

/// Division averages (1/(g n^2)) sum log|x(q) - beta|_v against their limits
/// int log|x - beta| mu_v.
pub fn theorem_b_table(c: &SuperellipticCurve, beta: &Q, places: &[Place], n_list: &[usize], prec: u32) -> Result<TheoremBTable, HeightError> {
    require_integral(c)?;
    let g = c.genus();
    let f = c.f();
    let mut primes = support_primes(c, [beta])?;
    primes.extend(places.iter().filter_map(|p| match p {
        Place::Prime(p) => Some(*p),
        Place::Infinity => None,
    }));
    primes.sort_unstable();
    primes.dedup();
    let mut excluded = Vec::new();
    let mut values: Vec<(usize, Q)> = Vec::new();
    for &n in n_list {
        if n < g {
            excluded.push(Exclusion { place: None, n, reason: format!("n < g = {g}") });
            continue;
        }
        let v = cantor::psi_value(f, n, beta)?;
        if v.is_zero() {
            excluded.push(Exclusion { place: None, n, reason: "psi_n(beta) = 0".into() });
            continue;
        }
        values.push((n, v));
    }
    let mut rows = Vec::new();
    for &place in places {
        let mut avgs = Vec::new();
        for (n, v) in &values {
            if !cantor::t_set_contains(residue_char(place), g, *n) {
                excluded.push(Exclusion { place: Some(place), n: *n, reason: "n not in T".into() });
                continue;
            }
            let s = cantor::division_sum_from_value(f, beta, *n, v, place, prec)?;
            avgs.push((*n, Float::with_val(prec, s / (g * n * n) as u32).to_f64()));
        }
        let target = match place {
            Place::Infinity if g <= 2 => {
                let ctx = LocalHeightContext::new(c, prec)?;
                2.0 * lambda_at_x(&ctx, f, beta, prec)?.to_f64()
            }
            Place::Infinity => {
                let pm = crate::analytic::periods(c, prec)?;
                let m = ArakelovMeasure::new(&pm, QuadratureSettings::default())?;
                m.log_potential(C::new(mp::fq(64, beta).to_f64(), 0.0))
            }
            Place::Prime(_) => match avgs.last() {
                Some(t) => t.1,
                None => continue,
            },
        };
        for (n, a) in avgs {
            rows.push(TheoremBRow { place, n, average: a, target, gap: (a - target).abs() });
        }
    }
    let product = values.iter().map(|(n, v)| product_row(&raw_sum_value(f, g, beta, *n, v), *n, &primes, prec)).collect();
    Ok(TheoremBTable { beta: rat::fmt_rational(beta), weierstrass: f.eval(beta).is_zero(), rows, excluded, product })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qf};

    fn curve(c: &[i64]) -> SuperellipticCurve {
        SuperellipticCurve::hyperelliptic(c).unwrap()
    }

    #[test]
    fn good_reduction_formula() {
        let c = curve(&[2, 0, 0, 1]);
        assert_eq!(lambda_good_reduction(&c, 5, &q(7), 64).unwrap().to_f64(), 0.0);
        let v = lambda_good_reduction(&c, 5, &qf(3, 25), 64).unwrap().to_f64();
        assert!((v - 5f64.ln()).abs() < 1e-15);
        assert_eq!(lambda_good_reduction(&c, 3, &q(1), 64).unwrap_err(), HeightError::BadReductionPrime(3));
        assert_eq!(lambda_good_reduction(&c, 2, &q(1), 64).unwrap_err(), HeightError::BadReductionPrime(2));
    }

    #[test]
    fn dpa_at_good_prime_and_excluded_n() {
        let c = curve(&[2, 0, 0, 1]);
        // beta = -1 is a 5-adic unit; lambda_5 vanishes
        for n in [3, 7, 11] {
            let v = lambda_dpa(&c, &q(-1), Place::Prime(5), n, 64).unwrap().to_f64();
            assert!(v.abs() < 1e-12, "{n} {v}");
        }
        assert!(matches!(lambda_dpa(&c, &q(-1), Place::Prime(5), 10, 64), Err(HeightError::NotInTSet { .. })));
        // (0, 1) has order 3 on y^2 = x^3 + 1
        let e = curve(&[1, 0, 0, 1]);
        assert!(matches!(lambda_dpa(&e, &q(0), Place::Infinity, 3, 64), Err(HeightError::NotInTSet { .. })));
    }

    #[test]
    fn elliptic_oracle() {
        let c = curve(&[2, 0, 0, 1]);
        let h = nt_height_elliptic(&c, &q(-1), 8).unwrap();
        let h7 = nt_height_elliptic(&c, &q(-1), 7).unwrap();
        assert!(h.value > 0.0 && (h.value - h7.value).abs() < 1e-3, "{h:?}");
        let x2 = x_multiple_g1(c.f(), &q(-1), 2).unwrap();
        assert_eq!(x2, qf(17, 4));
        let h2 = nt_height_elliptic(&c, &x2, 8).unwrap();
        assert!((h2.value - 4.0 * h.value).abs() < 1e-3);
        assert_eq!(nt_height_elliptic(&curve(&[0, -1, 0, 1]), &q(1), 5).unwrap_err(), HeightError::TwoTorsionPoint);
    }

    #[test]
    fn multiples_match_doubling() {
        let c = curve(&[2, 0, 0, 1]);
        let x2 = x_multiple_g1(c.f(), &q(-1), 2).unwrap();
        let x4 = x_multiple_g1(c.f(), &q(-1), 4).unwrap();
        assert_eq!(x_multiple_g1(c.f(), &x2, 2).unwrap(), x4);
        assert_eq!(x_multiple_g1(c.f(), &q(-1), 1).unwrap(), q(-1));
        assert!(x_multiple_g1(curve(&[0, -1, 0, 1]).f(), &q(0), 2).is_none());
    }

    #[test]
    fn height_of_origin_is_zero() {
        let c = curve(&[2, 0, 0, 1]);
        let r = canonical_height(&c, &Point::O, &HeightConfig::default()).unwrap();
        assert_eq!(r.height, 0.0);
        let off = Point::Affine(q(1), q(1));
        assert_eq!(canonical_height(&c, &off, &HeightConfig::default()).unwrap_err(), HeightError::NotOnCurve);
    }

    #[test]
    fn product_rows_are_exact() {
        let c = curve(&[2, 0, 0, 1]);
        let t = theorem_b_table(&c, &q(-1), &[Place::Prime(3)], &[3, 4, 5, 6, 9], 128).unwrap();
        assert_eq!(t.product.len(), 5);
        for r in &t.product {
            assert!(r.exact, "{r:?}");
            assert!(r.total.abs() < 1e-25, "{r:?}");
        }
        assert!(t.excluded.iter().any(|e| e.n == 6 || e.n == 9));
    }

    #[test]
    fn identity_trivial_for_n_one() {
        let c = curve(&[0, -1, 0, 1]);
        let ctx = LocalHeightContext::new(&c, 128).unwrap();
        let r = identity_check_g1(&ctx, &c, &q(2), 1, 128).unwrap();
        assert_eq!(r.log_a, 0.0);
        assert!(r.residual < 1e-30);
    }
}
