//! Acceptance suite: one line per criterion, `PASS` or `FAIL`.
//!
//! Criteria listed in `UNATTAINABLE` are computed at their stated tolerances
//! like every other one; they are known to fail at that tolerance, and the
//! suite only errors if their verdict changes. Pass criterion numbers as
//! arguments to run a subset: `cargo test --test acceptance -- 7 8`.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::time::Instant;

use common::{check_fixture, run_rows, without_runtime};
use primel_cli::cache;
use primel_core::analytics::{
    coefficient_identity, euler_coefficient_check, second_moment, weil_sweep, MomentReport,
    SweepLimits,
};
use primel_core::dirichlet::{afe_square_check, DirichletContext};
use primel_core::elliptic::{EllipticCurve, Reduction, TwistContext, TwistSweep};
use primel_core::enumerate::{count_irreducible, enumerate_monic};
use primel_core::{FieldSpec, Orientation, PrimePoly};
use serde_json::Value;

/// Known to fail at the stated tolerance; see the notes for the analysis.
const UNATTAINABLE: &[usize] = &[7, 8];

const CURVES: [&str; 4] = ["c1", "c2", "c3", "c4"];

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn(&mut Shared) -> Result<Outcome, String>;

#[derive(Default)]
struct Shared {
    /// Twist sweeps by curve name and degree.
    sweeps: HashMap<(String, usize), TwistSweep>,
    cache: Option<tempfile::TempDir>,
}

impl Shared {
    fn cache_dir(&mut self) -> PathBuf {
        self.cache
            .get_or_insert_with(|| tempfile::tempdir().expect("temporary directory"))
            .path()
            .to_path_buf()
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome, String> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn main() {
    let only: BTreeSet<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let criteria: [(usize, &str, Check); 12] = [
        (1, "prime census", c01_census),
        (2, "functional equation", c02_functional_equation),
        (3, "squared approximate functional equation", c03_afe),
        (4, "roots on the critical circle", c04_roots),
        (
            5,
            "divisor generating function and diagonal sum",
            c05_generating_function,
        ),
        (6, "second-moment trend", c06_second_moment),
        (7, "character averages", c07_weil_average),
        (8, "Euler-product constants", c08_euler_constants),
        (9, "elliptic curve structure", c09_elliptic_structure),
        (10, "derivative dual route", c10_derivative_routes),
        (11, "rank-one witnesses", c11_rank_one),
        (12, "first-derivative moment trend", c12_derivative_moment),
    ];
    let mut shared = Shared::default();
    let mut unexpected = Vec::new();
    let mut ran = 0;
    for (n, title, check) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let (pass, detail, errored) = match check(&mut shared) {
            Ok(o) => (o.pass, o.detail, false),
            Err(e) => (false, format!("error: {e}"), true),
        };
        let documented = UNATTAINABLE.contains(&n);
        let verdict = match (pass, documented) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as unattainable; update the notes)",
            (false, true) if !errored => "FAIL (unattainable at the stated tolerance)",
            _ => "FAIL",
        };
        println!(
            "criterion {n:>2} {verdict}: {title}; {detail} [{:.1}s]",
            start.elapsed().as_secs_f64()
        );
        if pass == documented || errored {
            unexpected.push(n);
        }
    }
    println!(
        "acceptance: {ran} criteria run, unexpected verdicts: {:?}",
        unexpected
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}

fn as_u64(v: &Value, key: &str) -> Result<u64, String> {
    v[key]
        .as_u64()
        .ok_or_else(|| format!("missing integer field {key}"))
}

fn as_f64(v: &Value, key: &str) -> Result<f64, String> {
    v[key]
        .as_f64()
        .ok_or_else(|| format!("missing float field {key}"))
}

fn mobius(n: usize) -> i128 {
    let mut m = n;
    let mut r = 1;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if m > 1 {
        -r
    } else {
        r
    }
}

/// `(1/n) Σ_{d | n} μ(d) q^{n/d}`.
fn necklace(q: u32, n: usize) -> u64 {
    let total: i128 = (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| mobius(d) * (q as i128).pow((n / d) as u32))
        .sum();
    (total / n as i128) as u64
}

fn c01_census(_: &mut Shared) -> Result<Outcome, String> {
    let start = Instant::now();
    let mut checked = 0;
    for q in [3u32, 5, 7] {
        let rows =
            run_rows(&["primes", "--q", &q.to_string(), "--deg", "8", "--upto"]).map_err(err)?;
        for (n, row) in (1..=8).zip(&rows) {
            let enumerated = as_u64(row, "enumerated")?;
            if enumerated != necklace(q, n) || as_u64(row, "census")? != enumerated {
                return outcome(false, format!("q = {q}, n = {n}: {row}"));
            }
            checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        checked == 24 && secs < 10.0,
        format!("{checked} (q, n) pairs exact in {secs:.2}s (limit 10s)"),
    )
}

/// `c_{2g-n} = q^{g-n} c_n`, rearranged to avoid fractions.
fn symmetric(c: &[i64], q: u32, g: usize) -> bool {
    let q = q as i128;
    (0..=g).all(|n| c[2 * g - n] as i128 == q.pow((g - n) as u32) * c[n] as i128)
}

fn c02_functional_equation(_: &mut Shared) -> Result<Outcome, String> {
    let start = Instant::now();
    let mut total = 0;
    for (q, degrees) in [(3u32, &[3usize, 5, 7][..]), (5, &[3, 5][..])] {
        let field = FieldSpec::new(q).map_err(err)?;
        for &d in degrees {
            let g = (d - 1) / 2;
            let ctx = DirichletContext::new(field, g, Orientation::Standard).map_err(err)?;
            let polys = ctx.map_conductors(|p| ctx.l_poly(p)).map_err(err)?;
            if polys.len() as u128 != count_irreducible(field, d) {
                return outcome(false, format!("q = {q}, degree {d}: population incomplete"));
            }
            if let Some(bad) = polys.iter().find(|l| !symmetric(l.coeffs(), q, g)) {
                return outcome(false, format!("fails for {}", bad.conductor()));
            }
            total += polys.len();
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        secs < 300.0,
        format!("{total} conductors exact in {secs:.1}s"),
    )
}

fn c03_afe(_: &mut Shared) -> Result<Outcome, String> {
    let start = Instant::now();
    let field = FieldSpec::new(3).map_err(err)?;
    let mut coefficientwise = 0;
    let mut at_one = 0;
    for g in 1..=3 {
        let ctx = DirichletContext::new(field, g, Orientation::Standard).map_err(err)?;
        let reports = ctx
            .map_conductors(|p| {
                let (l, t) = ctx.l_poly_and_divisor_sums(p)?;
                Ok((p.poly().clone(), afe_square_check(&l, &t)))
            })
            .map_err(err)?;
        for (p, r) in &reports {
            let ok = if g < 3 { r.coefficientwise } else { r.at_one };
            if !ok {
                return outcome(false, format!("fails for {p}"));
            }
        }
        if g < 3 {
            coefficientwise += reports.len();
        } else {
            at_one += reports.len();
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        secs < 600.0,
        format!("coefficientwise on {coefficientwise} conductors, at u = 1 on {at_one}"),
    )
}

fn c04_roots(_: &mut Shared) -> Result<Outcome, String> {
    let rows = run_rows(&["rh-check", "--q", "3", "--g", "3", "--upto"]).map_err(err)?;
    let mut worst: f64 = 0.0;
    let mut conductors = 0;
    for row in &rows {
        worst = worst.max(as_f64(row, "max_root_deviation")?);
        conductors += as_u64(row, "conductors")?;
        if row["weil_bound"] != Value::Bool(true) {
            return outcome(false, format!("coefficient bound fails: {row}"));
        }
    }
    outcome(
        worst < 1e-9 && conductors == 8 + 48 + 312,
        format!("max deviation {worst:.2e} over {conductors} conductors (degree 1 has no roots)"),
    )
}

/// `Σ_{deg f = n} τ(f²)` by factoring every monic `f`.
fn tau_square_brute(q: u32, n: usize) -> u64 {
    let field = FieldSpec::new(q).unwrap();
    enumerate_monic(field, n)
        .map(|f| {
            if n == 0 {
                return 1;
            }
            f.factor()
                .unwrap()
                .iter()
                .map(|(_, e)| 2 * *e as u64 + 1)
                .product::<u64>()
        })
        .sum()
}

fn c05_generating_function(_: &mut Shared) -> Result<Outcome, String> {
    let mut notes = Vec::new();
    for q in [3u32, 5] {
        let rows = run_rows(&["gf-check", "--q", &q.to_string(), "--n-max", "12"]).map_err(err)?;
        for row in &rows {
            let n = as_u64(row, "n")? as usize;
            if row["series"] != row["euler_product"] {
                return outcome(false, format!("q = {q}, n = {n}: {row}"));
            }
            if !row["enumeration"].is_null() && row["enumeration"] != row["series"] {
                return outcome(false, format!("q = {q}, n = {n}: enumeration differs"));
            }
            if n <= 4 && row["series"] != Value::String(tau_square_brute(q, n).to_string()) {
                return outcome(false, format!("q = {q}, n = {n}: factoring oracle differs"));
            }
        }
        let diag = run_rows(&["diagonal", "--q", &q.to_string(), "--x", "8"]).map_err(err)?;
        let consts: Vec<f64> = diag[2..]
            .iter()
            .map(|r| as_f64(r, "implied_constant"))
            .collect::<Result<_, _>>()?;
        let (lo, hi) = consts
            .iter()
            .fold((f64::INFINITY, 0f64), |(lo, hi), &c| (lo.min(c), hi.max(c)));
        if hi > 2.0 * lo {
            return outcome(false, format!("q = {q}: C ranges over [{lo:.3}, {hi:.3}]"));
        }
        notes.push(format!("q = {q}: C in [{lo:.3}, {hi:.3}]"));
    }
    outcome(
        true,
        format!("series = Euler product for n <= 12; {}", notes.join(", ")),
    )
}

fn moment_in_pool(threads: usize, g: usize) -> Result<MomentReport, String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(err)?
        .install(|| second_moment(3, g, Orientation::Standard, SweepLimits::default()))
        .map_err(err)
}

fn c06_second_moment(_: &mut Shared) -> Result<Outcome, String> {
    let argv = ["sweep-moment2", "--q", "3", "--g", "1"];
    let rows = without_runtime(run_rows(&argv).map_err(err)?);
    check_fixture("moment2_q3_g1", &argv, &rows)?;
    let mut reports = Vec::new();
    for g in 1..=4 {
        let one = moment_in_pool(1, g)?;
        let many = moment_in_pool(3, g)?;
        let a = serde_json::to_string(&one.empirical).map_err(err)?;
        let b = serde_json::to_string(&many.empirical).map_err(err)?;
        if a != b {
            return outcome(
                false,
                format!("g = {g}: thread counts disagree: {a} vs {b}"),
            );
        }
        reports.push(one);
    }
    let mut detail = Vec::new();
    let mut pass = true;
    for r in &reports[2..] {
        let with = r.residual.abs();
        let without = (r.empirical_float - r.predicted_main).abs();
        pass &= with < without;
        detail.push(format!("g = {}: |res| {with:.3} vs {without:.3}", r.g));
    }
    let scaled = |g: usize| reports[g - 1].residual.abs() / (g * g) as f64;
    pass &= scaled(4) < scaled(2);
    detail.push(format!(
        "|res|/g^2 {:.4} at g = 4 vs {:.4} at g = 2",
        scaled(4),
        scaled(2)
    ));
    outcome(
        pass,
        format!("reproducible for g = 1..4; {}", detail.join("; ")),
    )
}

fn c07_weil_average(_: &mut Shared) -> Result<Outcome, String> {
    let sweeps = (1..=3)
        .map(|g| weil_sweep(3, g, SweepLimits::default()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let c0 = sweeps[0].max_ratio;
    let max3 = sweeps[2].max_ratio;
    let decay = max3 <= 2.0 * c0;
    let min_square = sweeps
        .iter()
        .flat_map(|s| s.square_controls.iter().map(|(_, r)| *r))
        .fold(f64::INFINITY, f64::min);
    let controls = min_square > c0;
    outcome(
        decay && controls,
        format!(
            "max R: g = 1 {c0}, g = 2 {}, g = 3 {max3}; decay {}; square controls min R {min_square} > C0: {}",
            sweeps[1].max_ratio,
            if decay { "holds" } else { "fails (C0 = 0 at g = 1)" },
            controls
        ),
    )
}

fn c08_euler_constants(_: &mut Shared) -> Result<Outcome, String> {
    let start = Instant::now();
    for q in [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        let (lhs, rhs) = coefficient_identity(q).map_err(err)?;
        let expected = format!("{}/{q}", (3 * q + 1) / 2);
        if lhs != rhs || rhs.to_string() != expected {
            return outcome(false, format!("identity fails at q = {q}: {lhs} vs {rhs}"));
        }
    }
    let mut pass = true;
    let mut detail = vec!["identity exact for odd q <= 31".to_string()];
    for q in [3u32, 5] {
        let r = euler_coefficient_check(q, 12).map_err(err)?;
        pass &= r.a_error < 1e-6 && r.ratio_error < 1e-6;
        detail.push(format!(
            "q = {q}: |A - 1/zeta(2)| {:.2e}, |ratio - 2/(q-1)| {:.2e}",
            r.a_error, r.ratio_error
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(pass && secs < 60.0, detail.join("; "))
}

fn infinity_exponent(r: Reduction) -> i64 {
    match r {
        Reduction::Good => 0,
        Reduction::Multiplicative(_) => 1,
        Reduction::Additive => 2,
    }
}

fn load_curve(name: &str) -> Result<EllipticCurve, String> {
    let path = common::manifest_dir()
        .join("curves")
        .join(format!("{name}.json"));
    primel_cli::curves::CurveSpec::load(&path)
        .and_then(|s| s.build())
        .map_err(err)
}

/// `B_{m-k} = ε q^{m-2k} B_k` for all `k`.
fn twisted_symmetric(b: &[i128], eps: i8, q: u32) -> bool {
    let m = b.len() - 1;
    (0..=m).all(|k| {
        let (hi, lo) = (b[m - k], b[k]);
        if 2 * k <= m {
            hi == eps as i128 * (q as i128).pow((m - 2 * k) as u32) * lo
        } else {
            lo == eps as i128 * (q as i128).pow((2 * k - m) as u32) * hi
        }
    })
}

fn c09_elliptic_structure(shared: &mut Shared) -> Result<Outcome, String> {
    let cache_dir = shared.cache_dir();
    let mut profiles = BTreeSet::new();
    let mut twists = 0;
    for name in CURVES {
        let curve = load_curve(name)?;
        let q = curve.field().q();
        let (deg_m, deg_add) = curve.profile();
        profiles.insert((
            deg_m,
            deg_add,
            infinity_exponent(curve.reduction_at_infinity()),
        ));
        let formula =
            deg_m as i64 + 2 * deg_add as i64 + infinity_exponent(curve.reduction_at_infinity())
                - 4;
        let ctx = TwistContext::with_defaults(curve.clone()).map_err(err)?;
        let l = ctx.curve_l_polynomial();
        let eps = l.sign();
        if l.degree() as i64 != formula
            || eps.abs() != 1
            || !twisted_symmetric(l.unnormalized(), eps, q)
        {
            return outcome(
                false,
                format!("{name}: degree {} vs {formula}, sign {eps}", l.degree()),
            );
        }
        for d in [3, 5] {
            let sweep = ctx.sweep(d).map_err(err)?;
            let census = count_irreducible(curve.field(), d) as usize;
            if sweep.records.len() + sweep.skipped.len() != census {
                return outcome(false, format!("{name}, degree {d}: population incomplete"));
            }
            let mut degree_factors = BTreeSet::new();
            for r in &sweep.records {
                let p = PrimePoly::new(r.p.clone()).map_err(err)?;
                let chi_m = p.chi(curve.m(), Orientation::Literal).map_err(err)?.value();
                degree_factors.insert(r.eps * eps * chi_m);
                // Odd-degree twists are additive at infinity.
                let ok = r.m as i64 == deg_m as i64 + 2 * deg_add as i64 + 2 * d as i64 - 2
                    && r.coeffs[0] == 1
                    && twisted_symmetric(&r.coeffs, r.eps, q)
                    && (r.rank % 2 == 1) == (r.eps == -1);
                if !ok {
                    return outcome(false, format!("{name}: twist by {} fails", r.p));
                }
            }
            if degree_factors.len() != 1 {
                return outcome(
                    false,
                    format!("{name}, degree {d}: ε_d takes {degree_factors:?}"),
                );
            }
            twists += sweep.records.len();
            let path = cache::twist_path(&cache_dir, &curve, d, Orientation::Literal);
            cache::save_twists(&path, &curve, Orientation::Literal, &sweep.records).map_err(err)?;
            shared.sweeps.insert((name.to_string(), d), sweep);
        }
    }
    outcome(
        profiles.len() >= 3,
        format!(
            "{} curves over F_5 and F_7, {} reduction profiles, {twists} twists exact",
            CURVES.len(),
            profiles.len()
        ),
    )
}

fn c10_derivative_routes(shared: &mut Shared) -> Result<Outcome, String> {
    if shared.sweeps.is_empty() {
        c09_elliptic_structure(shared)?;
    }
    let mut checked = 0;
    for ((name, _), sweep) in &shared.sweeps {
        for r in sweep.records.iter().filter(|r| r.eps == -1) {
            let d = r.central_derivative().map_err(err)?;
            if !d.agrees {
                return outcome(false, format!("{name}: twist by {} disagrees", r.p));
            }
            checked += 1;
        }
    }
    outcome(checked > 0, format!("{checked} odd twists agree exactly"))
}

fn c11_rank_one(shared: &mut Shared) -> Result<Outcome, String> {
    let cache_dir = shared.cache_dir().display().to_string();
    let mut detail = Vec::new();
    for curve in ["c1", "t1"] {
        let path = format!("curves/{curve}.json");
        for g in ["1", "2"] {
            let argv = ["rank-search", "--curve", &path, "--g", g];
            let mut full = argv.to_vec();
            full.extend(["--cache", &cache_dir]);
            let rows = run_rows(&full).map_err(err)?;
            let witness = &rows[0]["witness"];
            if witness.is_null() || rows[0]["histogram"]["1"].is_null() {
                return outcome(false, format!("{curve}, g = {g}: no rank-one twist"));
            }
            check_fixture(&format!("rank_search_{curve}_g{g}"), &argv, &rows)?;
            detail.push(format!(
                "{curve}, g = {g}: witness {witness}, histogram {}",
                rows[0]["histogram"]
            ));
        }
    }
    outcome(true, detail.join("; "))
}

fn c12_derivative_moment(shared: &mut Shared) -> Result<Outcome, String> {
    let cache_dir = shared.cache_dir().display().to_string();
    let mut detail = Vec::new();
    for g in ["1", "2"] {
        let argv = ["ec-moment", "--curve", "curves/c1.json", "--g", g];
        let mut full = argv.to_vec();
        full.extend(["--cache", &cache_dir]);
        let rows = without_runtime(run_rows(&full).map_err(err)?);
        let r = &rows[0];
        let zero = serde_json::json!(["0", "0", 0]);
        if r["plus_contribution"] != zero || r["exception"] != Value::Bool(false) {
            return outcome(false, format!("g = {g}: {r}"));
        }
        check_fixture(&format!("ec_moment_c1_g{g}"), &argv, &rows)?;
        detail.push(format!(
            "g = {g}: empirical {:.6}, predicted {:.6}, ratio {:.4}",
            as_f64(r, "empirical_float")?,
            as_f64(r, "predicted")?,
            as_f64(r, "ratio")?
        ));
    }
    outcome(true, detail.join("; "))
}
