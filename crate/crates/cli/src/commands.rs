use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Instant;

use primel_core::analytics::{
    diagonal_sum, divisor_gf_check, ec_moment_from_sweep, euler_coefficient_check,
    moment_bound_spotcheck, moment_cost, tail_sum_e1, weil_avg_check, weil_sweep, MomentReport,
    SweepLimits,
};
use primel_core::dirichlet::{
    afe_square_check, l_coefficients_direct, DirichletContext, LPolynomial, SymbolPath,
};
use primel_core::elliptic::{
    rank_search_from_sweep, EllipticCurve, TwistContext, TwistOptions, TwistSweep,
};
use primel_core::enumerate::{count_irreducible, sieve_irreducible};
use primel_core::{FieldSpec, Orientation, Poly, PrimePoly};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cache;
use crate::config::*;
use crate::curves::CurveSpec;
use crate::error::{CliError, CliResult};
use crate::output::to_value;

/// Conductors computed between two cache flushes.
const FLUSH_EVERY: usize = 4096;

/// `prefix` followed by the fields of `body`.
fn row(prefix: Value, body: impl Serialize) -> CliResult<Value> {
    let mut out = Map::new();
    if let Value::Object(m) = prefix {
        out.extend(m);
    }
    match to_value(body)? {
        Value::Object(m) => out.extend(m),
        other => {
            out.insert("value".into(), other);
        }
    }
    Ok(Value::Object(out))
}

fn field(q: u32) -> CliResult<FieldSpec> {
    Ok(FieldSpec::new(q)?)
}

fn poly_arg(field: FieldSpec, s: &str) -> CliResult<Poly> {
    Ok(Poly::new(field, &parse_coeffs(s)?))
}

fn limits(max_cost: u64) -> SweepLimits {
    SweepLimits {
        max_cost: max_cost as u128,
    }
}

fn check_cost(q: u32, g: usize, max_cost: u64) -> CliResult<()> {
    if g == 0 {
        return Err(CliError::Config("genus must be at least 1".into()));
    }
    let cost = moment_cost(q, g)?;
    if cost > max_cost as u128 {
        return Err(CliError::Infeasible(format!(
            "all conductors of degree {} over F_{q}: about {cost} character evaluations, limit {max_cost}",
            2 * g + 1
        )));
    }
    Ok(())
}

fn genera(g: usize, upto: bool) -> std::ops::RangeInclusive<usize> {
    if upto {
        1..=g
    } else {
        g..=g
    }
}

pub fn run(cli: &Cli) -> CliResult<Vec<Value>> {
    let g = &cli.global;
    match &cli.command {
        Command::Primes(a) => primes(g, a),
        Command::Lpoly(a) => lpoly(g, a),
        Command::SweepMoment2(a) => sweep_moment2(g, a),
        Command::AfeCheck(a) => afe_check(g, a),
        Command::RhCheck(a) => rh_check(g, a),
        Command::Diagonal(a) => diagonal(g, a),
        Command::GfCheck(a) => gf_check(g, a),
        Command::WeilCheck(a) => weil_check(g, a),
        Command::TailE1(a) => tail_e1(g, a),
        Command::EulerCheck(a) => euler_check(g, a),
        Command::EcLpoly(a) => ec_lpoly(g, a),
        Command::EcTwist(a) => ec_twist(g, a),
        Command::EcMoment(a) => ec_moment(g, a),
        Command::RankSearch(a) => rank_search(g, a),
        Command::BoundSpotcheck(a) => bound_spotcheck(g, a),
    }
}

fn primes(g: &GlobalArgs, a: &PrimesArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    let field = field(q)?;
    let deg = g.require_deg()?;
    if deg == 0 {
        return Err(CliError::Config("--deg must be at least 1".into()));
    }
    let degrees = if a.upto { 1..=deg } else { deg..=deg };
    degrees
        .map(|n| {
            let census = count_irreducible(field, n) as u64;
            let enumerated = sieve_irreducible(field, n)?.iter().filter(|&&p| p).count() as u64;
            if census != enumerated {
                return Err(CliError::Invariant(format!(
                    "degree {n}: enumeration found {enumerated} primes, the formula gives {census}"
                )));
            }
            Ok(json!({ "q": q, "deg": n, "census": census, "enumerated": enumerated }))
        })
        .collect()
}

fn lpoly(g: &GlobalArgs, a: &LpolyArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    let field = field(q)?;
    let p = PrimePoly::new(poly_arg(field, &a.p)?)?;
    let deg = p.degree();
    if deg % 2 == 0 {
        return Err(CliError::Config(format!("conductor degree {deg} is even")));
    }
    let genus = (deg - 1) / 2;
    let orientation: Orientation = a.orientation.into();
    let ctx = DirichletContext::new(field, genus, orientation)?;
    let l = ctx.l_poly(&p)?;
    if a.direct {
        for path in [SymbolPath::Reciprocity, SymbolPath::Euler] {
            let d = l_coefficients_direct(&p, orientation, path)?;
            if d.coeffs() != l.coeffs() {
                return Err(CliError::Invariant(format!(
                    "pointwise sum ({path:?}) gives {:?}, the sieve {:?}",
                    d.coeffs(),
                    l.coeffs()
                )));
            }
        }
    }
    let max_root_deviation = if genus > 0 {
        Some(l.rh_roots()?.max_deviation)
    } else {
        None
    };
    Ok(vec![json!({
        "q": q,
        "P": p.poly(),
        "g": genus,
        "orientation": orientation,
        "coeffs": l.coeffs(),
        "functional_equation": l.verify_functional_equation(),
        "weil_bound": l.weil_coefficient_bound(),
        "central_value": l.central_value(),
        "central_float": l.central_value_f64(),
        "max_root_deviation": max_root_deviation,
        "direct_checked": a.direct,
    })])
}

/// L-polynomials of every conductor of the context, reusing and extending
/// the cache when one is configured.
pub fn dirichlet_sweep(
    ctx: &DirichletContext,
    cache_dir: Option<&PathBuf>,
) -> CliResult<Vec<LPolynomial>> {
    let q = ctx.field().q();
    let (genus, orientation) = (ctx.genus(), ctx.orientation());
    let path = cache_dir.map(|d| cache::dirichlet_path(d, q, genus, orientation));
    let mut known = match &path {
        Some(p) => cache::load_dirichlet(p, q, genus, orientation)?,
        None => HashMap::new(),
    };
    let conductors = ctx.conductors();
    let missing: Vec<&PrimePoly> = conductors
        .iter()
        .filter(|p| !known.contains_key(p.poly()))
        .collect();
    for chunk in missing.chunks(FLUSH_EVERY) {
        let fresh = chunk
            .par_iter()
            .map(|p| ctx.l_poly(p))
            .collect::<primel_core::Result<Vec<_>>>()?;
        for l in fresh {
            known.insert(l.conductor().clone(), l);
        }
        if let Some(path) = &path {
            let ordered: Vec<&LPolynomial> = conductors
                .iter()
                .filter_map(|p| known.get(p.poly()))
                .collect();
            cache::save_dirichlet(path, orientation, &ordered)?;
        }
    }
    conductors
        .iter()
        .map(|p| {
            known.remove(p.poly()).ok_or_else(|| {
                CliError::Invariant(format!("conductor {} missing after the sweep", p.poly()))
            })
        })
        .collect()
}

fn sweep_moment2(g: &GlobalArgs, a: &MomentArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    let genus = g.require_g()?;
    check_cost(q, genus, a.max_cost)?;
    let start = Instant::now();
    let ctx = DirichletContext::new(field(q)?, genus, a.orientation.into())?;
    let polys = dirichlet_sweep(&ctx, g.cache_dir())?;
    let report = MomentReport::from_polynomials(q, genus, &polys, start.elapsed().as_secs_f64())?;
    Ok(vec![to_value(report)?])
}

fn afe_check(g: &GlobalArgs, a: &SweepArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    let field = field(q)?;
    genera(g.require_g()?, a.upto)
        .map(|genus| {
            check_cost(q, genus, a.max_cost)?;
            let ctx = DirichletContext::new(field, genus, a.orientation.into())?;
            let reports = ctx.map_conductors(|p| {
                let (l, t) = ctx.l_poly_and_divisor_sums(p)?;
                Ok((p.poly().clone(), afe_square_check(&l, &t)))
            })?;
            if let Some((p, r)) = reports.iter().find(|(_, r)| !r.holds()) {
                return Err(CliError::Invariant(format!(
                    "approximate functional equation fails for {p} (coefficientwise: {}, at u = 1: {})",
                    r.coefficientwise, r.at_one
                )));
            }
            Ok(json!({
                "q": q,
                "g": genus,
                "conductors": reports.len(),
                "coefficientwise": reports.iter().filter(|(_, r)| r.coefficientwise).count(),
                "at_one": reports.iter().filter(|(_, r)| r.at_one).count(),
            }))
        })
        .collect()
}

/// Root deviation reported as within tolerance below this.
pub const RH_TOLERANCE: f64 = 1e-9;

fn rh_check(g: &GlobalArgs, a: &SweepArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    let field = field(q)?;
    genera(g.require_g()?, a.upto)
        .map(|genus| {
            check_cost(q, genus, a.max_cost)?;
            let ctx = DirichletContext::new(field, genus, a.orientation.into())?;
            let rows = ctx.map_conductors(|p| {
                let l = ctx.l_poly(p)?;
                Ok((
                    p.poly().clone(),
                    l.rh_roots()?.max_deviation,
                    l.weil_coefficient_bound(),
                ))
            })?;
            if let Some((p, _, _)) = rows.iter().find(|r| !r.2) {
                return Err(CliError::Invariant(format!(
                    "coefficient bound |c_n| ≤ C(2g, n) q^(n/2) fails for {p}"
                )));
            }
            let (argmax, max_dev, _) = rows
                .iter()
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .expect("at least one conductor");
            Ok(json!({
                "q": q,
                "g": genus,
                "conductors": rows.len(),
                "max_root_deviation": max_dev,
                "argmax": argmax,
                "within_tolerance": *max_dev < RH_TOLERANCE,
                "weil_bound": true,
            }))
        })
        .collect()
}

fn diagonal(g: &GlobalArgs, a: &DiagonalArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    (1..=a.x)
        .map(|x| {
            let r = diagonal_sum(q, x)?;
            if r.enumeration.as_ref().is_some_and(|e| *e != r.series) {
                return Err(CliError::Invariant(format!(
                    "diagonal sum at X = {x}: enumeration and series differ"
                )));
            }
            to_value(r)
        })
        .collect()
}

fn gf_check(g: &GlobalArgs, a: &GfArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    let r = divisor_gf_check(q, a.n_max)?;
    if let Some(bad) = r.rows.iter().find(|row| !row.holds()) {
        return Err(CliError::Invariant(format!(
            "generating-function routes disagree at n = {}",
            bad.n
        )));
    }
    r.rows.iter().map(|x| row(json!({ "q": q }), x)).collect()
}

fn weil_check(g: &GlobalArgs, a: &WeilArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    let genus = g.require_g()?;
    if let Some(f) = &a.f {
        check_cost(q, genus, a.max_cost)?;
        let f = poly_arg(field(q)?, f)?;
        return Ok(vec![to_value(weil_avg_check(q, genus, &f)?)?]);
    }
    let s = weil_sweep(q, genus, limits(a.max_cost))?;
    let min_square = s
        .square_controls
        .iter()
        .map(|(_, r)| *r)
        .fold(f64::INFINITY, f64::min);
    Ok(vec![json!({
        "q": q,
        "g": genus,
        "census": s.census,
        "tested": s.tested,
        "max_ratio": s.max_ratio,
        "argmax": s.argmax,
        "square_controls": s.square_controls.len(),
        "min_square_ratio": if s.square_controls.is_empty() { None } else { Some(min_square) },
    })])
}

fn tail_e1(g: &GlobalArgs, a: &TailArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    let r = tail_sum_e1(q, g.require_g()?, a.x, limits(a.max_cost))?;
    if !r.decomposition_holds {
        return Err(CliError::Invariant(
            "head + tail differs from the full sum".into(),
        ));
    }
    Ok(vec![to_value(r)?])
}

fn euler_check(g: &GlobalArgs, a: &EulerArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    let r = euler_coefficient_check(q, a.truncation)?;
    if !r.identity_holds {
        return Err(CliError::Invariant(format!(
            "coefficient identity fails at q = {q}: {} vs {}",
            r.coefficient_identity_lhs, r.coefficient_identity_rhs
        )));
    }
    Ok(vec![to_value(r)?])
}

fn curve_context(g: &GlobalArgs, a: &CurveArgs) -> CliResult<TwistContext> {
    let spec = CurveSpec::from_args(a, g.q)?;
    let options = TwistOptions {
        orientation: a.orientation.into(),
        ..TwistOptions::default()
    };
    Ok(TwistContext::new(spec.build()?, options)?)
}

fn curve_prefix(curve: &EllipticCurve) -> Value {
    json!({ "q": curve.field().q(), "A": curve.a(), "B": curve.b() })
}

fn to_i64(v: &[i128]) -> CliResult<Vec<i64>> {
    v.iter()
        .map(|&c| {
            i64::try_from(c)
                .map_err(|_| CliError::Invariant(format!("coefficient {c} overflows i64")))
        })
        .collect()
}

fn ec_lpoly(g: &GlobalArgs, a: &CurveArgs) -> CliResult<Vec<Value>> {
    let ctx = curve_context(g, a)?;
    let c = ctx.curve();
    let l = ctx.curve_l_polynomial();
    if !l.verify_functional_equation() {
        return Err(CliError::Invariant(
            "functional equation of the curve fails".into(),
        ));
    }
    let (deg_m, deg_add) = c.profile();
    let body = json!({
        "delta": c.delta(),
        "conductor_degree": c.conductor_degree(),
        "deg_m": deg_m,
        "deg_additive": deg_add,
        "infinity": c.reduction_at_infinity().to_string(),
        "M": c.m(),
        "multiplicative": c.mult_primes(),
        "additive": c.add_primes(),
        "degree": l.degree(),
        "sign": l.sign(),
        "coeffs": to_i64(l.unnormalized())?,
        "functional_equation": true,
    });
    Ok(vec![row(curve_prefix(c), body)?])
}

/// All twists of degree `d`, resuming from and refreshing the cache.
pub fn twist_sweep(
    ctx: &TwistContext,
    d: usize,
    cache_dir: Option<&PathBuf>,
) -> CliResult<TwistSweep> {
    let orientation = ctx.options().orientation;
    let path = cache_dir.map(|dir| cache::twist_path(dir, ctx.curve(), d, orientation));
    let mut known = HashMap::new();
    if let Some(path) = &path {
        for (p, r) in cache::load_twists(path, ctx.curve(), orientation)? {
            let r = ctx
                .revalidate(r)
                .map_err(|e| CliError::cache(path, e.to_string()))?;
            known.insert(p, r);
        }
    }
    let sweep = ctx.sweep_resuming(d, &known)?;
    if let Some(path) = &path {
        if sweep.records.iter().any(|r| !known.contains_key(&r.p)) {
            cache::save_twists(path, ctx.curve(), orientation, &sweep.records)?;
        }
    }
    Ok(sweep)
}

fn odd_twist_degree(g: &GlobalArgs) -> CliResult<usize> {
    let d = g.require_deg()?;
    if d % 2 == 0 {
        return Err(CliError::Config(format!(
            "twisting primes have odd degree, got {d}"
        )));
    }
    Ok(d)
}

fn ec_twist(g: &GlobalArgs, a: &CurveArgs) -> CliResult<Vec<Value>> {
    let ctx = curve_context(g, a)?;
    let d = odd_twist_degree(g)?;
    let sweep = twist_sweep(&ctx, d, g.cache_dir())?;
    sweep
        .records
        .iter()
        .map(|r| {
            Ok(json!({
                "q": r.q(),
                "P": r.p,
                "m": r.m,
                "eps": r.eps,
                "eps_deg": r.eps_deg,
                "chi_m": r.chi_m,
                "rank": r.rank,
                "sign_from_window": r.sign_from_window,
                "horizon": r.horizon,
                "verified_pairs": r.verified_pairs,
                "coeffs": to_i64(&r.coeffs)?,
            }))
        })
        .collect()
}

fn ec_moment(g: &GlobalArgs, a: &EcMomentArgs) -> CliResult<Vec<Value>> {
    let start = Instant::now();
    let ctx = curve_context(g, &a.curve)?;
    let genus = g.require_g()?;
    let sweep = twist_sweep(&ctx, 2 * genus + 1, g.cache_dir())?;
    let mut r = ec_moment_from_sweep(&ctx, &sweep, a.sym2_degree)?;
    r.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(vec![row(curve_prefix(ctx.curve()), r)?])
}

fn rank_search(g: &GlobalArgs, a: &CurveArgs) -> CliResult<Vec<Value>> {
    let ctx = curve_context(g, a)?;
    let genus = g.require_g()?;
    let sweep = twist_sweep(&ctx, 2 * genus + 1, g.cache_dir())?;
    let r = rank_search_from_sweep(&ctx, &sweep)?;
    Ok(vec![row(curve_prefix(ctx.curve()), r)?])
}

fn bound_spotcheck(g: &GlobalArgs, a: &BoundArgs) -> CliResult<Vec<Value>> {
    let q = g.require_q()?;
    let genus = g.require_g()?;
    moment_bound_spotcheck(q, genus, &a.thetas, limits(a.max_cost))?
        .iter()
        .map(|r| row(json!({ "q": q, "g": genus }), r))
        .collect()
}
