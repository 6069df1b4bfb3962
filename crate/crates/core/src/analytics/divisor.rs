use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::enumerate::{count_irreducible, FactorTable};
use crate::error::Result;
use crate::field::FieldSpec;

/// Table size up to which the enumeration route is run.
const ENUMERATION_CAP: u128 = 1_000_000;

pub(crate) fn ser_display<T: std::fmt::Display, S: Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn ser_opt_display<T: std::fmt::Display, S: Serializer>(
    v: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

fn binom(n: &BigInt, k: usize) -> BigInt {
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    out
}

fn table_len(q: u32, n: usize) -> u128 {
    ((q as u128).pow(n as u32 + 1) - 1) / (q as u128 - 1)
}

/// `[v^n] (1 - qv²)/(1 - qv)³ = q^n C(n+2, 2) - q^{n-1} C(n, 2)`.
pub fn diagonal_series_coefficient(q: u32, n: usize) -> BigInt {
    let qb = BigInt::from(q);
    let lead = num_traits::pow(qb.clone(), n) * BigInt::from((n + 2) * (n + 1) / 2);
    if n < 2 {
        return lead;
    }
    lead - num_traits::pow(qb, n - 1) * BigInt::from(n * (n - 1) / 2)
}

/// `Σ_{deg f = n} τ(f²)` for `n ≤ n_max` from the Euler product
/// `Π_d ((1 + v^d)/(1 - v^d)²)^{π(d)}`, using only the prime counts.
fn euler_product_coefficients(field: FieldSpec, n_max: usize) -> Vec<BigInt> {
    let mut series = vec![BigInt::zero(); n_max + 1];
    series[0] = BigInt::one();
    for d in 1..=n_max {
        let pi = BigInt::from(count_irreducible(field, d));
        let kmax = n_max / d;
        // (1 + x)^π (1 - x)^{-2π} in x = v^d
        let up: Vec<BigInt> = (0..=kmax).map(|k| binom(&pi, k)).collect();
        let down: Vec<BigInt> = (0..=kmax)
            .map(|k| binom(&(BigInt::from(2) * &pi + BigInt::from(k) - 1), k))
            .collect();
        let factor: Vec<BigInt> = (0..=kmax)
            .map(|k| (0..=k).map(|i| &up[i] * &down[k - i]).sum())
            .collect();
        let mut next = vec![BigInt::zero(); n_max + 1];
        for (i, s) in series.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            for (k, f) in factor.iter().enumerate() {
                let j = i + k * d;
                if j > n_max {
                    break;
                }
                next[j] += s * f;
            }
        }
        series = next;
    }
    series
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GfRow {
    pub n: usize,
    #[serde(serialize_with = "ser_display")]
    pub series: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub euler_product: BigInt,
    #[serde(serialize_with = "ser_opt_display")]
    pub enumeration: Option<BigInt>,
}

impl GfRow {
    pub fn holds(&self) -> bool {
        self.series == self.euler_product
            && self.enumeration.as_ref().is_none_or(|e| *e == self.series)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GfReport {
    pub q: u32,
    pub rows: Vec<GfRow>,
    pub holds: bool,
}

/// `Σ_{deg f = n} τ(f²) = [v^n] 𝒵(v)³/𝒵(v²)` for `n ≤ n_max`: the series
/// coefficient against the Euler product over prime counts, and against
/// direct enumeration where the table is small enough.
pub fn divisor_gf_check(q: u32, n_max: usize) -> Result<GfReport> {
    let field = FieldSpec::new(q)?;
    if n_max > 12 {
        return Err(crate::Error::InvalidArgument(format!(
            "n_max must be at most 12, got {n_max}"
        )));
    }
    let euler = euler_product_coefficients(field, n_max);
    let enum_deg = (0..=n_max)
        .rev()
        .find(|&n| table_len(q, n) <= ENUMERATION_CAP)
        .unwrap_or(0);
    let table = FactorTable::new(field, enum_deg)?;
    let t2 = table.tau_square_table();
    let rows: Vec<GfRow> = (0..=n_max)
        .map(|n| GfRow {
            n,
            series: diagonal_series_coefficient(q, n),
            euler_product: euler[n].clone(),
            enumeration: (n <= enum_deg)
                .then(|| table.degree_range(n).map(|i| BigInt::from(t2[i])).sum()),
        })
        .collect();
    Ok(GfReport {
        q,
        holds: rows.iter().all(GfRow::holds),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalReport {
    pub q: u32,
    pub x: usize,
    /// `Σ_{deg f ≤ X} τ(f²)/|f|` by enumeration, when run.
    #[serde(serialize_with = "ser_opt_display")]
    pub enumeration: Option<BigRational>,
    /// The same from the series coefficients.
    #[serde(serialize_with = "ser_display")]
    pub series: BigRational,
    /// `X³/(6ζ_q(2)) + X²`.
    pub predicted: f64,
    pub difference: f64,
    /// `|difference| / X`.
    pub implied_constant: f64,
}

pub fn diagonal_sum(q: u32, x: usize) -> Result<DiagonalReport> {
    let field = FieldSpec::new(q)?;
    let qb = BigInt::from(q);
    let series: BigRational = (0..=x)
        .map(|n| {
            BigRational::new(
                diagonal_series_coefficient(q, n),
                num_traits::pow(qb.clone(), n),
            )
        })
        .sum();
    let enumeration = if x <= 8 && table_len(q, x) <= ENUMERATION_CAP {
        let table = FactorTable::new(field, x)?;
        let t2 = table.tau_square_table();
        Some(
            (0..=x)
                .map(|n| {
                    let s: BigInt = table.degree_range(n).map(|i| BigInt::from(t2[i])).sum();
                    BigRational::new(s, num_traits::pow(qb.clone(), n))
                })
                .sum(),
        )
    } else {
        None
    };
    let xf = x as f64;
    let predicted = xf.powi(3) * super::inv_zeta2(q) / 6.0 + xf * xf;
    let difference = series.to_f64().unwrap_or(f64::NAN) - predicted;
    Ok(DiagonalReport {
        q,
        x,
        enumeration,
        series,
        predicted,
        difference,
        implied_constant: if x == 0 { 0.0 } else { difference.abs() / xf },
    })
}
