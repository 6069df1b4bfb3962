use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::zeta_q;
use crate::enumerate::count_irreducible;
use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Truncated Euler products for the second-moment constants.
#[derive(Debug, Clone, Serialize)]
pub struct EulerCheckReport {
    pub q: u32,
    pub truncation_degree: usize,
    /// `A(1/2; 0, 0)` over `deg Q ≤ D`.
    pub a_value: f64,
    /// `1/ζ_q(2)`.
    pub zeta_target: String,
    pub a_error: f64,
    /// `A_1 / ((log q) A)` by differentiating the local factors numerically.
    pub ratio_numeric: f64,
    /// The same from `Σ 3 deg Q/(|Q|-1) - Σ (3|Q|+1) deg Q/(|Q|²-1)`.
    pub ratio_two_sums: f64,
    /// The same from `Σ 2 deg Q/(|Q|²-1)`.
    pub derivative_ratio: f64,
    pub ratio_target: f64,
    pub ratio_error: f64,
    /// `3/(2ζ_q(2)) + 2/(ζ_q(2)(q-1))`.
    pub coefficient_identity_lhs: String,
    /// `3/2 + 1/(2q)`.
    pub coefficient_identity_rhs: String,
    pub identity_holds: bool,
    /// `|A - 1/ζ_q(2)| < q^{-D/2}`.
    pub a_within_bound: bool,
    /// `|ratio - 2/(q-1)| < q^{-D}`.
    pub ratio_within_bound: bool,
}

/// Both sides of `3/(2ζ_q(2)) + 2/(ζ_q(2)(q-1)) = 3/2 + 1/(2q)`.
pub fn coefficient_identity(q: u32) -> Result<(BigRational, BigRational)> {
    let inv = zeta_q(q, 2)?.recip();
    let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let lhs = &inv * r(3, 2) + &inv * r(2, q as i64 - 1);
    let rhs = r(3, 2) + r(1, 2 * q as i64);
    Ok((lhs, rhs))
}

/// `ln` of the local factor of `A(1/2; z₁, z₂)` at a prime of norm `q^d`.
/// The bracket equals `(1 + x₁x₂)/((1 - x₁²)(1 - x₂²))`; every piece goes
/// through `ln_1p` so that tiny factors keep their relative precision.
fn log_local(q: f64, d: f64, z1: f64, z2: f64) -> f64 {
    let lq = d * q.ln();
    let p = |s: f64| (-s * lq).exp();
    let front =
        (-p(1.0 + z1 + z2)).ln_1p() + (-p(1.0 + 2.0 * z1)).ln_1p() + (-p(1.0 + 2.0 * z2)).ln_1p();
    let (x1, x2) = (p(0.5 + z1), p(0.5 + z2));
    front + (x1 * x2).ln_1p() - (-x1 * x1).ln_1p() - (-x2 * x2).ln_1p()
}

pub fn euler_coefficient_check(q: u32, d_max: usize) -> Result<EulerCheckReport> {
    let field = FieldSpec::new(q)?;
    if d_max == 0 || d_max > 15 {
        return Err(Error::InvalidArgument(format!(
            "truncation degree must be in 1..=15, got {d_max}"
        )));
    }
    let qf = q as f64;
    let mut log_a = 0.0;
    let mut numeric = 0.0;
    let mut one_sum = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for d in 1..=d_max {
        let pi = count_irreducible(field, d) as f64;
        let df = d as f64;
        let norm = qf.powi(d as i32);
        log_a += pi * log_local(qf, df, 0.0, 0.0);
        // Five-point stencil, step scaled to the prime's log-norm.
        let h = 1e-3 / (df * qf.ln());
        let f = |z: f64| log_local(qf, df, z, 0.0);
        let deriv = (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
        numeric += pi * deriv / qf.ln();
        one_sum += pi * 2.0 * df / (norm * norm - 1.0);
        first += pi * 3.0 * df / (norm - 1.0);
        second += pi * (3.0 * norm + 1.0) * df / (norm * norm - 1.0);
    }
    let a_value = log_a.exp();
    let target_a = super::inv_zeta2(q);
    let ratio_target = 2.0 / (qf - 1.0);
    let (lhs, rhs) = coefficient_identity(q)?;
    let a_error = (a_value - target_a).abs();
    let ratio_error = (one_sum - ratio_target).abs();
    Ok(EulerCheckReport {
        q,
        truncation_degree: d_max,
        a_value,
        zeta_target: zeta_q(q, 2)?.recip().to_string(),
        a_error,
        ratio_numeric: numeric,
        ratio_two_sums: first - second,
        derivative_ratio: one_sum,
        ratio_target,
        ratio_error,
        identity_holds: lhs == rhs,
        coefficient_identity_lhs: lhs.to_string(),
        coefficient_identity_rhs: rhs.to_string(),
        a_within_bound: a_error < qf.powf(-(d_max as f64) / 2.0),
        ratio_within_bound: ratio_error < qf.powi(-(d_max as i32)),
    })
}
