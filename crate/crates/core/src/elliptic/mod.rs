//! Elliptic curves `y² = x³ + A(t)x + B(t)` over `F_q(t)` and the
//! L-polynomials of their quadratic twists by prime polynomials.

mod extfield;
mod lambda;
mod twist;

pub use extfield::ExtField;
pub use lambda::{brute_force_trace, CurveTables, EcLPolynomial};
pub use twist::{
    rank_one_search, rank_search_from_sweep, DerivativeReport, RankSearch, TwistContext,
    TwistOptions, TwistRecord, TwistSweep,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::Poly;
use crate::symbol::{jacobi_symbol, PrimePoly};

/// Reduction type at a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Good,
    /// Multiplicative, with `a_Q = +1` (split) or `-1` (non-split).
    Multiplicative(i8),
    Additive,
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reduction::Good => write!(f, "good"),
            Reduction::Multiplicative(1) => write!(f, "split multiplicative"),
            Reduction::Multiplicative(_) => write!(f, "non-split multiplicative"),
            Reduction::Additive => write!(f, "additive"),
        }
    }
}

/// A curve in short Weierstrass form, with its bad primes classified.
#[derive(Debug, Clone)]
pub struct EllipticCurve {
    field: FieldSpec,
    a: Poly,
    b: Poly,
    delta: Poly,
    mult_primes: Vec<(Poly, i8)>,
    add_primes: Vec<Poly>,
    m: Poly,
    infinity: Reduction,
    infinity_star: bool,
    conductor_degree: i64,
}

impl EllipticCurve {
    /// Builds the curve and factors its discriminant `4A³ + 27B²`.
    pub fn new(a: Poly, b: Poly) -> Result<Self> {
        let field = a.field();
        field.check_same(b.q())?;
        if field.q() % 2 == 0 || field.q() % 3 == 0 {
            return Err(Error::InvalidField {
                q: field.q() as u64,
                reason: "elliptic-curve operations need (q, 6) = 1",
            });
        }
        let delta = a.pow(3).scale(4).add(&b.pow(2).scale(27))?;
        if delta.is_zero() {
            return Err(Error::InvalidArgument(
                "singular curve: discriminant is zero".into(),
            ));
        }
        let (_, monic_delta) = delta.make_monic();
        let mut mult_primes = Vec::new();
        let mut add_primes = Vec::new();
        for (qp, _) in monic_delta.factor()? {
            if a.rem(&qp)?.is_zero() {
                let q4 = qp.pow(4);
                let q6 = qp.pow(6);
                if a.rem(&q4)?.is_zero() && b.rem(&q6)?.is_zero() {
                    return Err(Error::InvalidArgument(format!(
                        "model is not minimal at {qp}"
                    )));
                }
                add_primes.push(qp);
            } else {
                let sign = multiplicative_sign(&a, &b, &qp)?;
                mult_primes.push((qp, sign));
            }
        }
        let m = mult_primes
            .iter()
            .try_fold(Poly::one(field), |acc, (p, _)| acc.mul(p))?;
        let (infinity, infinity_star) = reduction_at_infinity(&a, &b)?;
        let add_deg: usize = add_primes.iter().map(|p| p.deg().unwrap()).sum();
        let inf_exp = match infinity {
            Reduction::Good => 0,
            Reduction::Multiplicative(_) => 1,
            Reduction::Additive => 2,
        };
        let conductor_degree = m.deg().unwrap() as i64 + 2 * add_deg as i64 + inf_exp - 4;
        if conductor_degree < 0 {
            return Err(Error::InvalidArgument(format!(
                "conductor degree {conductor_degree} is negative; the curve is not of the supported kind"
            )));
        }
        Ok(Self {
            field,
            a,
            b,
            delta,
            mult_primes,
            add_primes,
            m,
            infinity,
            infinity_star,
            conductor_degree,
        })
    }

    /// From coefficient lists (lowest degree first).
    pub fn from_coeffs(q: u32, a: &[i64], b: &[i64]) -> Result<Self> {
        let field = FieldSpec::for_elliptic(q)?;
        Self::new(Poly::new(field, a), Poly::new(field, b))
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn a(&self) -> &Poly {
        &self.a
    }

    pub fn b(&self) -> &Poly {
        &self.b
    }

    pub fn delta(&self) -> &Poly {
        &self.delta
    }

    pub fn mult_primes(&self) -> &[(Poly, i8)] {
        &self.mult_primes
    }

    pub fn add_primes(&self) -> &[Poly] {
        &self.add_primes
    }

    /// Product of the multiplicative primes.
    pub fn m(&self) -> &Poly {
        &self.m
    }

    /// Reduction type at the place at infinity.
    pub fn reduction_at_infinity(&self) -> Reduction {
        self.infinity
    }

    /// Whether the fibre at infinity is of type `I_n*`, which a quadratic
    /// twist ramified at infinity turns into semistable reduction.
    pub fn infinity_is_star(&self) -> bool {
        self.infinity_star
    }

    /// `𝔫 = deg M + 2 deg(Π additive) - 4`, where the place at infinity
    /// (degree 1) is counted among the bad places.
    pub fn conductor_degree(&self) -> i64 {
        self.conductor_degree
    }

    /// `(deg M, deg Π additive)`.
    pub fn profile(&self) -> (usize, usize) {
        (
            self.m.deg().unwrap(),
            self.add_primes.iter().map(|p| p.deg().unwrap()).sum(),
        )
    }

    pub fn is_bad(&self, qp: &Poly) -> bool {
        self.mult_primes.iter().any(|(p, _)| p == qp) || self.add_primes.contains(qp)
    }

    /// Reduction type at a monic irreducible `Q`.
    pub fn classify_reduction(&self, qp: &PrimePoly) -> Result<Reduction> {
        self.field.check_same(qp.field().q())?;
        let p = qp.poly();
        if !self.delta.rem(p)?.is_zero() {
            return Ok(Reduction::Good);
        }
        if self.a.rem(p)?.is_zero() {
            return Ok(Reduction::Additive);
        }
        Ok(Reduction::Multiplicative(multiplicative_sign(
            &self.a, &self.b, p,
        )?))
    }
}

/// Reduction at `t = ∞` of the model `s^{4k} A(1/s)`, `s^{6k} B(1/s)` with
/// the least admissible `k`, and whether that fibre is of type `I_n*`.
fn reduction_at_infinity(a: &Poly, b: &Poly) -> Result<(Reduction, bool)> {
    let da = a.deg().map_or(0, |d| d.div_ceil(4));
    let db = b.deg().map_or(0, |d| d.div_ceil(6));
    let k = da.max(db).max(1);
    // Orders at s = 0 of A∞ and B∞.
    let ord_a = a.deg().map_or(usize::MAX, |d| 4 * k - d);
    let ord_b = b.deg().map_or(usize::MAX, |d| 6 * k - d);
    let field = a.field();
    let rev = |p: &Poly, w: usize| -> Poly {
        let mut c = vec![0u32; w + 1];
        for (i, &x) in p.coeffs().iter().enumerate() {
            c[w - i] = x;
        }
        Poly::from_residues(field, c)
    };
    let ainf = rev(a, 4 * k);
    let binf = rev(b, 6 * k);
    let dinf = ainf.pow(3).scale(4).add(&binf.pow(2).scale(27))?;
    let ord_d = dinf
        .coeffs()
        .iter()
        .position(|&c| c != 0)
        .unwrap_or(usize::MAX);
    if ord_d == 0 {
        return Ok((Reduction::Good, false));
    }
    if ord_a == 0 {
        let s = Poly::x(field);
        let sign = multiplicative_sign(&ainf, &binf, &s)?;
        return Ok((Reduction::Multiplicative(sign), false));
    }
    Ok((
        Reduction::Additive,
        ord_d >= 6 && (ord_a == 2 || ord_b == 3),
    ))
}

/// At a node `α` of `x³ + ax + b` the tangent slopes are `±√(3α)` with
/// `α = -3b/(2a)`, so `a_Q = η(3α) = η(-2ab)`.
fn multiplicative_sign(a: &Poly, b: &Poly, qp: &Poly) -> Result<i8> {
    let v = a.mul(b)?.scale(qp.q() - 2);
    match jacobi_symbol(&v, qp)?.value() {
        0 => Err(Error::Invariant(format!(
            "node at {qp} has a vanishing slope invariant"
        ))),
        s => Ok(s),
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "y^2 = x^3 + ({})x + ({}) over F_{}",
            self.a.to_string().replace('x', "t"),
            self.b.to_string().replace('x', "t"),
            self.field.q()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_characteristic() {
        assert!(EllipticCurve::from_coeffs(3, &[0, 1], &[1]).is_err());
        let f3 = FieldSpec::new(3).unwrap();
        assert!(EllipticCurve::new(Poly::new(f3, &[0, 1]), Poly::new(f3, &[1])).is_err());
    }

    #[test]
    fn rejects_singular() {
        assert!(EllipticCurve::from_coeffs(5, &[0], &[0]).is_err());
    }

    #[test]
    fn classification_rule() {
        // A = t, B = 1 over F_5: Δ = 4t³ + 27 = 4t³ + 2.
        let e = EllipticCurve::from_coeffs(5, &[0, 1], &[1]).unwrap();
        let d = e.delta().make_monic().1;
        let fac = d.factor().unwrap();
        let total: usize = fac
            .iter()
            .map(|(p, k)| p.deg().unwrap() * *k as usize)
            .sum();
        assert_eq!(total, 3);
        assert!(e.add_primes().is_empty());
        for (p, _) in &fac {
            let pp = PrimePoly::new(p.clone()).unwrap();
            assert!(matches!(
                e.classify_reduction(&pp).unwrap(),
                Reduction::Multiplicative(_)
            ));
        }
        let t = PrimePoly::new(Poly::x(e.field())).unwrap();
        assert_eq!(e.classify_reduction(&t).unwrap(), Reduction::Good);
    }

    #[test]
    fn conductor_degree_counts_infinity() {
        // Δ = 4t³ + 27 is squarefree; the fibre at infinity is additive.
        let e = EllipticCurve::from_coeffs(5, &[0, 1], &[1]).unwrap();
        assert_eq!(e.reduction_at_infinity(), Reduction::Additive);
        assert!(!e.infinity_is_star());
        assert_eq!(e.conductor_degree(), 1);
        // A constant, B linear: type II* at infinity and two nodes.
        let e = EllipticCurve::from_coeffs(5, &[1], &[1, 1]).unwrap();
        assert_eq!(e.profile(), (2, 0));
        assert_eq!(e.conductor_degree(), 0);
    }

    #[test]
    fn non_minimal_models_are_refused() {
        // A = t^4, B = t^6 (t^6 + 1)
        assert!(EllipticCurve::from_coeffs(
            5,
            &[0, 0, 0, 0, 1],
            &[0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1]
        )
        .is_err());
    }
}
