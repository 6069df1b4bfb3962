//! Moment sweeps, diagonal sums, generating-function identities and
//! Euler-product constants.
//!
//! Exact quantities are returned in [`QuadValue`](crate::QuadValue),
//! [`QuadFraction`](crate::QuadFraction) or `BigRational`; the asymptotic
//! predictions they are compared against are plain floats.

mod curve;
mod divisor;
mod euler;
mod moments;

pub use curve::{
    ec_first_derivative_moment, ec_moment_from_sweep, sym2_constant, EcMomentReport, Sym2Report,
};
pub use divisor::{
    diagonal_series_coefficient, diagonal_sum, divisor_gf_check, DiagonalReport, GfReport, GfRow,
};
pub use euler::{coefficient_identity, euler_coefficient_check, EulerCheckReport};
pub use moments::{
    moment_bound_spotcheck, moment_cost, second_moment, tail_sum_e1, weil_avg_check, weil_sweep,
    BoundRow, E1Report, MomentReport, SweepLimits, WeilReport, WeilSweep,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `ζ_q(s) = 1/(1 - q^{1-s})` at an integer `s`.
pub fn zeta_q(q: u32, s: i64) -> Result<BigRational> {
    if s == 1 {
        return Err(Error::InvalidArgument("ζ_q has a pole at s = 1".into()));
    }
    let qb = BigInt::from(q);
    let e = 1 - s;
    let power = if e >= 0 {
        BigRational::from_integer(num_traits::pow(qb, e as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(qb, (-e) as usize))
    };
    let den = BigRational::one() - power;
    if den.is_zero() {
        return Err(Error::InvalidArgument("ζ_q has a pole here".into()));
    }
    Ok(den.recip())
}

/// Coefficient of `u^n` in `Z(u) = 1/(1 - qu)`, the number of monic
/// polynomials of degree `n`.
pub fn z_coefficient(q: u32, n: usize) -> BigInt {
    num_traits::pow(BigInt::from(q), n)
}

/// `1/ζ_q(2) = (q - 1)/q` as a float.
pub(crate) fn inv_zeta2(q: u32) -> f64 {
    (q as f64 - 1.0) / q as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(zeta_q(5, 2).unwrap(), r(5, 4));
        assert_eq!(zeta_q(3, 2).unwrap(), r(3, 2));
        assert_eq!(zeta_q(3, 0).unwrap(), r(-1, 2));
        assert!(zeta_q(7, 1).is_err());
        assert_eq!(z_coefficient(3, 3), BigInt::from(27));
    }
}
