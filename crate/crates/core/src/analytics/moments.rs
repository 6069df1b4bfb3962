use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::divisor::ser_display;
use super::inv_zeta2;
use crate::dirichlet::{DirichletContext, LPolynomial};
use crate::enumerate::count_irreducible;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::Poly;
use crate::quad::{quad_sum, QuadFraction, QuadValue};
use crate::symbol::Orientation;

/// Upper bound on `|𝒫_{2g+1}| × #{monic f : deg f ≤ 2g+1}` for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepLimits {
    pub max_cost: u128,
}

impl Default for SweepLimits {
    fn default() -> Self {
        Self {
            max_cost: 2_000_000_000,
        }
    }
}

/// Character evaluations needed to sweep every conductor of degree `2g+1`.
pub fn moment_cost(q: u32, g: usize) -> Result<u128> {
    let field = FieldSpec::new(q)?;
    let n = 2 * g + 1;
    let monics = ((q as u128).pow(n as u32 + 1) - 1) / (q as u128 - 1);
    Ok(count_irreducible(field, n) * monics)
}

fn feasible(q: u32, g: usize, limits: SweepLimits) -> Result<()> {
    if g == 0 {
        return Err(Error::InvalidArgument("genus must be at least 1".into()));
    }
    let cost = moment_cost(q, g)?;
    if cost > limits.max_cost {
        return Err(Error::Infeasible {
            what: format!("sweep over all primes of degree {} at q = {q}", 2 * g + 1),
            estimate: format!("{cost} character evaluations (limit {})", limits.max_cost),
        });
    }
    Ok(())
}

/// One row of the second-moment experiment.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub q: u32,
    pub g: usize,
    pub census: u64,
    /// `(1/|𝒫_{2g+1}|) Σ_P L(1/2, χ_P)²`, exactly.
    pub empirical: QuadFraction,
    pub empirical_float: f64,
    /// `g³/(3ζ_q(2))`.
    pub predicted_main: f64,
    /// `g²(3/2 + 1/(2q))`.
    pub predicted_secondary: f64,
    /// `empirical - main - secondary`.
    pub residual: f64,
    pub runtime_seconds: f64,
}

impl MomentReport {
    /// Builds the report from the L-polynomials of every conductor of
    /// degree `2g+1`.
    pub fn from_polynomials(
        q: u32,
        g: usize,
        polys: &[LPolynomial],
        runtime_seconds: f64,
    ) -> Result<Self> {
        let field = FieldSpec::new(q)?;
        let census = count_irreducible(field, 2 * g + 1);
        if polys.len() as u128 != census {
            return Err(Error::Invariant(format!(
                "{} L-polynomials for {census} conductors",
                polys.len()
            )));
        }
        if let Some(bad) = polys
            .iter()
            .find(|l| l.q() != q || l.genus() != g || !l.verify_functional_equation())
        {
            return Err(Error::Invariant(format!(
                "conductor {} fails the functional equation",
                bad.conductor()
            )));
        }
        let squares: Vec<QuadValue> = polys
            .par_iter()
            .map(|l| {
                let c = l.central_value();
                &c * &c
            })
            .collect();
        let empirical = QuadFraction::new(quad_sum(q, &squares), BigInt::from(census));
        let gf = g as f64;
        let main = gf.powi(3) * inv_zeta2(q) / 3.0;
        let secondary = gf * gf * (1.5 + 0.5 / q as f64);
        let empirical_float = empirical.to_f64();
        Ok(Self {
            q,
            g,
            census: census as u64,
            empirical,
            empirical_float,
            predicted_main: main,
            predicted_secondary: secondary,
            residual: empirical_float - main - secondary,
            runtime_seconds,
        })
    }
}

/// Exact second moment of `L(1/2, χ_P)` over `P ∈ 𝒫_{2g+1}`.
pub fn second_moment(
    q: u32,
    g: usize,
    orientation: Orientation,
    limits: SweepLimits,
) -> Result<MomentReport> {
    feasible(q, g, limits)?;
    let start = Instant::now();
    let ctx = DirichletContext::new(FieldSpec::new(q)?, g, orientation)?;
    let polys = ctx.map_conductors(|p| ctx.l_poly(p))?;
    MomentReport::from_polynomials(q, g, &polys, start.elapsed().as_secs_f64())
}

/// `|(1/|𝒫_{2g+1}|) Σ_P χ_P(f)|` against `q^{-g} deg f`.
#[derive(Debug, Clone, Serialize)]
pub struct WeilReport {
    pub q: u32,
    pub g: usize,
    pub f: Poly,
    pub census: u64,
    #[serde(serialize_with = "ser_display")]
    pub average: BigRational,
    /// `R(f) = |average| / (q^{-g} deg f)`.
    pub ratio: f64,
}

fn weil_ratio(q: u32, g: usize, deg: usize, sum: i64, census: u64) -> (BigRational, f64) {
    let avg = BigRational::new(sum.into(), (census as i64).into());
    let r = avg.abs().to_f64().unwrap() * (q as f64).powi(g as i32) / deg as f64;
    (avg, r)
}

pub fn weil_avg_check(q: u32, g: usize, f: &Poly) -> Result<WeilReport> {
    let field = FieldSpec::new(q)?;
    field.check_same(f.q())?;
    if !f.is_monic() || f.deg().unwrap_or(0) == 0 {
        return Err(Error::InvalidArgument(
            "f must be monic of degree at least 1".into(),
        ));
    }
    if f.is_perfect_square()? {
        return Err(Error::InvalidArgument(format!(
            "{f} is a perfect square; the bound does not apply"
        )));
    }
    let ctx = DirichletContext::new(field, g, Orientation::Standard)?;
    let vals = ctx.map_conductors(|p| Ok(p.chi(f, Orientation::Standard)?.value() as i64))?;
    let census = vals.len() as u64;
    let (average, ratio) = weil_ratio(q, g, f.deg().unwrap(), vals.iter().sum(), census);
    Ok(WeilReport {
        q,
        g,
        f: f.clone(),
        census,
        average,
        ratio,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WeilSweep {
    pub q: u32,
    pub g: usize,
    pub census: u64,
    /// Non-square monic `f` with `1 ≤ deg f ≤ 2g`.
    pub tested: usize,
    pub max_ratio: f64,
    pub argmax: Poly,
    /// `(f, R(f))` for every square `f` in the same range.
    pub square_controls: Vec<(Poly, f64)>,
}

/// `R(f)` for every monic `f` of degree `1..=2g`, from one character table
/// per conductor.
pub fn weil_sweep(q: u32, g: usize, limits: SweepLimits) -> Result<WeilSweep> {
    feasible(q, g, limits)?;
    let field = FieldSpec::new(q)?;
    let ctx = DirichletContext::new(field, g, Orientation::Standard)?;
    let table = ctx.table();
    let hi = table.degree_range(2 * g).end;
    let sums = ctx
        .conductors()
        .par_iter()
        .map(|p| {
            ctx.characters(p)
                .map(|c| c[..hi].iter().map(|&x| x as i64).collect::<Vec<_>>())
        })
        .try_reduce(
            || vec![0i64; hi],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let census = count_irreducible(field, 2 * g + 1) as u64;
    let squares = table.square_table();
    let ix = table.indexer();
    let mut max_ratio = -1.0;
    let mut argmax = 1;
    let mut tested = 0;
    let mut square_controls = Vec::new();
    for i in table.degree_range(1).start..hi {
        let deg = ix.degree_of(i);
        let (_, r) = weil_ratio(q, g, deg, sums[i], census);
        if squares[i] {
            square_controls.push((ix.poly_at(i), r));
        } else {
            tested += 1;
            if r > max_ratio {
                max_ratio = r;
                argmax = i;
            }
        }
    }
    Ok(WeilSweep {
        q,
        g,
        census,
        tested,
        max_ratio,
        argmax: ix.poly_at(argmax),
        square_controls,
    })
}

/// The tail `E₁(X)` of the first sum of the approximate functional equation.
#[derive(Debug, Clone, Serialize)]
pub struct E1Report {
    pub q: u32,
    pub g: usize,
    pub x: usize,
    pub census: u64,
    /// `(1/|𝒫|) Σ_P Σ_{2X < deg f ≤ 2g} τ(f)χ_P(f)/√|f|`.
    pub tail: QuadFraction,
    /// The same over `deg f ≤ 2X`.
    pub head: QuadFraction,
    /// The same over `deg f ≤ 2g`, summed separately.
    pub full: QuadFraction,
    pub decomposition_holds: bool,
    pub tail_float: f64,
    /// `g²(g - X)/(2ζ_q(2))`.
    pub predicted: f64,
}

pub fn tail_sum_e1(q: u32, g: usize, x: usize, limits: SweepLimits) -> Result<E1Report> {
    if x >= g {
        return Err(Error::InvalidArgument(format!(
            "need X < g, got X = {x}, g = {g}"
        )));
    }
    feasible(q, g, limits)?;
    let field = FieldSpec::new(q)?;
    let ctx = DirichletContext::new(field, g, Orientation::Standard)?;
    let t = ctx
        .conductors()
        .par_iter()
        .map(|p| ctx.divisor_twisted_sums(p))
        .try_reduce(
            || vec![0i64; 2 * g + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let census = count_irreducible(field, 2 * g + 1) as u64;
    let part = |range: std::ops::RangeInclusive<usize>| {
        let terms: Vec<QuadValue> = range
            .map(|n| QuadValue::normalized(q, t[n], n as u32))
            .collect();
        QuadFraction::new(quad_sum(q, &terms), BigInt::from(census))
    };
    let head = part(0..=2 * x);
    let tail = part(2 * x + 1..=2 * g);
    let full = part(0..=2 * g);
    let gf = g as f64;
    Ok(E1Report {
        q,
        g,
        x,
        census,
        decomposition_holds: head.try_add(&tail)? == full,
        tail_float: tail.to_f64(),
        tail,
        head,
        full,
        predicted: gf * gf * (gf - x as f64) * inv_zeta2(q) / 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub theta: f64,
    /// `(1/|𝒫|) Σ_P |𝓛(e^{iθ}/√q, χ_P)|²`.
    pub average: f64,
    /// `g min{g, 1/‖2θ‖}²`, with `‖·‖` the distance to `2πℤ`.
    pub reference: f64,
}

pub fn moment_bound_spotcheck(
    q: u32,
    g: usize,
    thetas: &[f64],
    limits: SweepLimits,
) -> Result<Vec<BoundRow>> {
    feasible(q, g, limits)?;
    if let Some(t) = thetas
        .iter()
        .find(|t| !(0.0..std::f64::consts::TAU).contains(*t))
    {
        return Err(Error::InvalidArgument(format!(
            "θ = {t} is outside [0, 2π)"
        )));
    }
    let ctx = DirichletContext::new(FieldSpec::new(q)?, g, Orientation::Standard)?;
    let polys = ctx.map_conductors(|p| ctx.l_poly(p))?;
    let r = (q as f64).sqrt().recip();
    let gf = g as f64;
    Ok(thetas
        .iter()
        .map(|&theta| {
            let u = Complex64::from_polar(r, theta);
            let total: f64 = polys.iter().map(|l| l.eval_complex(u).norm_sqr()).sum();
            let two = (2.0 * theta).rem_euclid(std::f64::consts::TAU);
            let dist = two.min(std::f64::consts::TAU - two);
            let cap = if dist == 0.0 { gf } else { gf.min(1.0 / dist) };
            BoundRow {
                theta,
                average: total / polys.len() as f64,
                reference: gf * cap * cap,
            }
        })
        .collect())
}
