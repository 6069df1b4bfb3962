use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::elliptic::{CurveTables, TwistContext, TwistSweep};
use crate::enumerate::count_irreducible;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quad::{quad_sum, QuadFraction, QuadValue};

/// The truncated Euler product `K(N)`.
#[derive(Debug, Clone, Serialize)]
pub struct Sym2Report {
    pub n: Poly,
    pub truncation_degree: usize,
    pub value: f64,
    /// Product over `deg Q ≤ d` for `d = 1..=D`.
    pub partial: Vec<f64>,
}

/// `K(N) = Π_{deg Q ≤ D} Σ_{j + ord_Q N even, j deg Q ≤ D} λ(Q^j) |Q|^{-j/2}`,
/// each local sum exact before conversion.
pub fn sym2_constant(tables: &CurveTables, n: &Poly, d_max: usize) -> Result<Sym2Report> {
    let curve = tables.curve();
    curve.field().check_same(n.q())?;
    if d_max == 0 || d_max > 12 || d_max > tables.max_degree() {
        return Err(Error::InvalidArgument(format!(
            "truncation degree {d_max} must be in 1..=min(12, {})",
            tables.max_degree()
        )));
    }
    if !n.is_monic() {
        return Err(Error::NotMonic("K(N) modulus"));
    }
    let factors = n.factor()?;
    if factors.iter().any(|(_, e)| *e > 1) {
        return Err(Error::InvalidArgument(format!("{n} is not square-free")));
    }
    if let Some((p, _)) = factors.iter().find(|(p, _)| !curve.is_bad(p)) {
        return Err(Error::InvalidArgument(format!(
            "{p} divides N but is a prime of good reduction"
        )));
    }
    let table = tables.table();
    let ix = table.indexer();
    let a = tables.unnormalized();
    let q = curve.field().q() as i64;
    let mut partial = Vec::with_capacity(d_max);
    let mut value = 1.0f64;
    for d in 1..=d_max {
        let norm = BigInt::from(q.pow(d as u32));
        for &pi in table.primes_of_degree(d) {
            let qp = ix.poly_at(pi as usize);
            let parity = factors.iter().any(|(p, _)| *p == qp) as usize;
            let mut local = BigRational::zero();
            let mut j = parity;
            while j * d <= d_max {
                let idx = ix.index_of(&qp.pow(j as u32)).unwrap();
                local += BigRational::new(BigInt::from(a[idx]), num_traits::pow(norm.clone(), j));
                j += 2;
            }
            value *= local.to_f64().unwrap();
        }
        partial.push(value);
    }
    Ok(Sym2Report {
        n: n.clone(),
        truncation_degree: d_max,
        value,
        partial,
    })
}

/// The first-derivative moment of the twists `E ⊗ χ_P`, `P ∈ 𝒫_{2g+1}`.
#[derive(Debug, Clone, Serialize)]
pub struct EcMomentReport {
    pub q: u32,
    pub g: usize,
    /// `|𝒫_{2g+1}|`, the normalising count.
    pub census: u64,
    /// Primes of degree `2g+1` coprime to `Δ`.
    pub terms: usize,
    pub eps_deg: i8,
    pub curve_sign: i8,
    /// `ε_{2g+1} ε(E) = 1` and `M = 1`: no asymptotic is claimed.
    pub exception: bool,
    /// `(1/|𝒫|) Σ_P ε⁻ S_P`; `L' = 2 (log q) S`.
    pub empirical: QuadFraction,
    pub empirical_float: f64,
    /// Contribution of the `ε = +1` twists, which must be zero.
    pub plus_contribution: QuadValue,
    /// `(1/|𝒫|) Σ_P S_P` without the `ε⁻` filter.
    pub unfiltered: QuadFraction,
    pub k_one: f64,
    pub k_m: f64,
    pub sym2_degree: usize,
    /// `(K(1) - ε_{2g+1} ε(E) K(M)) g`.
    pub predicted: f64,
    pub ratio: f64,
    pub runtime_seconds: f64,
}

fn check_genus(ctx: &TwistContext, g: usize) -> Result<()> {
    let deg_delta = ctx.curve().delta().deg().unwrap();
    if 2 * g + 2 < deg_delta {
        return Err(Error::InvalidArgument(format!(
            "need g ≥ (deg Δ - 2)/2 = {}/2",
            deg_delta as i64 - 2
        )));
    }
    Ok(())
}

pub fn ec_first_derivative_moment(
    ctx: &TwistContext,
    g: usize,
    sym2_degree: Option<usize>,
) -> Result<EcMomentReport> {
    let start = Instant::now();
    check_genus(ctx, g)?;
    let sweep = ctx.sweep(2 * g + 1)?;
    let mut report = ec_moment_from_sweep(ctx, &sweep, sym2_degree)?;
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// As [`ec_first_derivative_moment`] on an already computed sweep of odd
/// degree `2g + 1`.
pub fn ec_moment_from_sweep(
    ctx: &TwistContext,
    sweep: &TwistSweep,
    sym2_degree: Option<usize>,
) -> Result<EcMomentReport> {
    let start = Instant::now();
    if sweep.degree % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "twist degree {} is even",
            sweep.degree
        )));
    }
    let g = (sweep.degree - 1) / 2;
    check_genus(ctx, g)?;
    let curve = ctx.curve();
    let q = curve.field().q();
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    let mut all = Vec::new();
    for r in &sweep.records {
        let s = if r.eps == -1 {
            let d = r.central_derivative()?;
            if !d.agrees {
                return Err(Error::Invariant(format!(
                    "derivative routes disagree for the twist by {}",
                    r.p
                )));
            }
            d.lemma_sum
        } else {
            r.derivative_sum()
        };
        let weighted = s.mul_int(&BigInt::from(r.eps_minus()));
        if r.eps == 1 {
            plus.push(weighted.clone());
        }
        minus.push(weighted);
        all.push(s);
    }
    let census = count_irreducible(curve.field(), 2 * g + 1) as u64;
    let empirical = QuadFraction::new(quad_sum(q, &minus), BigInt::from(census));
    let unfiltered = QuadFraction::new(quad_sum(q, &all), BigInt::from(census));
    let d = sym2_degree.unwrap_or_else(|| ctx.tables().max_degree().min(12));
    let one = Poly::one(curve.field());
    let k_one = sym2_constant(ctx.tables(), &one, d)?.value;
    let k_m = sym2_constant(ctx.tables(), curve.m(), d)?.value;
    let sign = sweep.eps_deg * ctx.curve_sign();
    let predicted = (k_one - sign as f64 * k_m) * g as f64;
    let empirical_float = empirical.to_f64();
    Ok(EcMomentReport {
        q,
        g,
        census,
        terms: sweep.records.len(),
        eps_deg: sweep.eps_deg,
        curve_sign: ctx.curve_sign(),
        exception: sign == 1 && curve.m().is_one(),
        empirical,
        empirical_float,
        plus_contribution: quad_sum(q, &plus),
        unfiltered,
        k_one,
        k_m,
        sym2_degree: d,
        predicted,
        ratio: empirical_float / predicted,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}
