//! L-polynomials of quadratic characters `χ_P` with `P` prime of odd degree.

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::enumerate::{enumerate_monic, FactorTable};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::Poly;
use crate::quad::QuadValue;
use crate::roots::integer_poly_roots;
use crate::symbol::{character_table, Orientation, PrimePoly};

/// `𝓛(u, χ_P) = Σ_{n ≤ 2g} c_n u^n` for a prime conductor of degree `2g + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPolynomial {
    conductor: Poly,
    genus: usize,
    coeffs: Vec<i64>,
    orientation: Orientation,
}

impl LPolynomial {
    /// Wraps a coefficient list without recomputing it (cache loads, tests).
    pub fn from_parts(
        conductor: Poly,
        genus: usize,
        coeffs: Vec<i64>,
        orientation: Orientation,
    ) -> Result<Self> {
        if coeffs.len() != 2 * genus + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for genus {genus}, got {}",
                2 * genus + 1,
                coeffs.len()
            )));
        }
        if conductor.deg() != Some(2 * genus + 1) {
            return Err(Error::InvalidArgument(format!(
                "conductor degree {} does not match genus {genus}",
                conductor.degree()
            )));
        }
        Ok(Self {
            conductor,
            genus,
            coeffs,
            orientation,
        })
    }

    pub fn conductor(&self) -> &Poly {
        &self.conductor
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn q(&self) -> u32 {
        self.conductor.q()
    }

    /// `c_{2g-n} = q^{g-n} c_n` for every `n`, as an exact integer identity.
    pub fn verify_functional_equation(&self) -> bool {
        let g = self.genus as i64;
        let q = BigInt::from(self.q());
        (0..=2 * self.genus).all(|n| {
            let lhs = BigInt::from(self.coeffs[2 * self.genus - n]);
            let k = g - n as i64;
            let rhs = BigInt::from(self.coeffs[n]);
            if k >= 0 {
                lhs == rhs * num_traits::pow(q.clone(), k as usize)
            } else {
                lhs * num_traits::pow(q.clone(), (-k) as usize) == rhs
            }
        })
    }

    /// `|c_n| ≤ C(2g, n) q^{n/2}`, checked as `c_n² ≤ C(2g, n)² q^n`.
    pub fn weil_coefficient_bound(&self) -> bool {
        let two_g = 2 * self.genus;
        let q = BigInt::from(self.q());
        let mut binom = BigInt::from(1);
        for n in 0..=two_g {
            if n > 0 {
                binom = binom * BigInt::from(two_g - n + 1) / BigInt::from(n);
            }
            let c = BigInt::from(self.coeffs[n]);
            if &c * &c > &binom * &binom * num_traits::pow(q.clone(), n) {
                return false;
            }
        }
        true
    }

    /// `L(1/2, χ_P) = Σ c_n q^{-n/2}`, exactly.
    pub fn central_value(&self) -> QuadValue {
        let q = self.q();
        self.coeffs
            .iter()
            .enumerate()
            .fold(QuadValue::zero(q), |acc, (n, &c)| {
                &acc + &QuadValue::normalized(q, c, n as u32)
            })
    }

    /// Horner evaluation of `𝓛` at a complex point.
    pub fn eval_complex(&self, u: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c as f64)
    }

    pub fn central_value_f64(&self) -> f64 {
        self.eval_complex(Complex64::new((self.q() as f64).sqrt().recip(), 0.0))
            .re
    }

    /// Roots of `𝓛` and their largest distance from the circle
    /// `|u| = q^{-1/2}`.
    pub fn rh_roots(&self) -> Result<RhReport> {
        if self.genus == 0 {
            return Err(Error::InvalidArgument(
                "root check needs an L-polynomial of degree >= 1".into(),
            ));
        }
        let q = BigInt::from(self.q());
        let leading_ok =
            BigInt::from(self.coeffs[2 * self.genus]) == num_traits::pow(q, self.genus);
        if !leading_ok {
            return Err(Error::Invariant(format!(
                "leading coefficient {} is not q^g for conductor {}",
                self.coeffs[2 * self.genus],
                self.conductor
            )));
        }
        let ints: Vec<BigInt> = self.coeffs.iter().map(|&c| BigInt::from(c)).collect();
        let roots = integer_poly_roots(&ints)?;
        if roots.len() != 2 * self.genus {
            return Err(Error::NonConvergence(format!(
                "found {} roots for degree {}",
                roots.len(),
                2 * self.genus
            )));
        }
        let target = (self.q() as f64).sqrt().recip();
        let max_deviation = roots
            .iter()
            .map(|z| (z.norm() - target).abs())
            .fold(0.0, f64::max);
        Ok(RhReport {
            roots,
            max_deviation,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RhReport {
    pub roots: Vec<Complex64>,
    pub max_deviation: f64,
}

/// How residue symbols are evaluated in the pointwise coefficient routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolPath {
    Reciprocity,
    Euler,
}

fn genus_of(p: &PrimePoly) -> Result<usize> {
    let d = p.degree();
    if d % 2 == 0 {
        return Err(Error::Unsupported(format!(
            "even-degree conductor (degree {d})"
        )));
    }
    Ok((d - 1) / 2)
}

/// Coefficients by summing `χ_P` pointwise over every monic polynomial of
/// degree `<= 2g + 1`. Slow; the validation route for
/// [`DirichletContext::l_poly`].
pub fn l_coefficients_direct(
    p: &PrimePoly,
    orientation: Orientation,
    path: SymbolPath,
) -> Result<LPolynomial> {
    let g = genus_of(p)?;
    let field = p.field();
    let mut c = Vec::with_capacity(2 * g + 2);
    for n in 0..=2 * g + 1 {
        let mut s = 0i64;
        for f in enumerate_monic(field, n) {
            let v = match (path, orientation) {
                (SymbolPath::Euler, Orientation::Standard) => p.euler(&f)?.value(),
                (SymbolPath::Euler, Orientation::Literal) => {
                    let s = if n % 2 == 1 { p.orientation_twist() } else { 1 };
                    s * p.euler(&f)?.value()
                }
                (SymbolPath::Reciprocity, o) => p.chi(&f, o)?.value(),
            };
            s += v as i64;
        }
        c.push(s);
    }
    finish(p, g, c, orientation)
}

fn finish(
    p: &PrimePoly,
    g: usize,
    mut c: Vec<i64>,
    orientation: Orientation,
) -> Result<LPolynomial> {
    if c[2 * g + 1] != 0 {
        return Err(Error::Invariant(format!(
            "character sum in degree {} is {} for conductor {}",
            2 * g + 1,
            c[2 * g + 1],
            p.poly()
        )));
    }
    c.truncate(2 * g + 1);
    LPolynomial::from_parts(p.poly().clone(), g, c, orientation)
}

/// Coefficients for a single conductor.
pub fn l_coefficients(p: &PrimePoly, orientation: Orientation) -> Result<LPolynomial> {
    let g = genus_of(p)?;
    DirichletContext::new(p.field(), g, orientation)?.l_poly(p)
}

/// Shared tables for all conductors of one degree `2g + 1`.
#[derive(Debug, Clone)]
pub struct DirichletContext {
    field: FieldSpec,
    genus: usize,
    orientation: Orientation,
    table: FactorTable,
    tau: Vec<u32>,
}

impl DirichletContext {
    pub fn new(field: FieldSpec, genus: usize, orientation: Orientation) -> Result<Self> {
        let table = FactorTable::new(field, 2 * genus + 1)?;
        let tau = table.tau_table();
        Ok(Self {
            field,
            genus,
            orientation,
            table,
            tau,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn table(&self) -> &FactorTable {
        &self.table
    }

    /// `𝒫_{2g+1}` in index order.
    pub fn conductors(&self) -> Vec<PrimePoly> {
        self.table
            .primes_of_degree(2 * self.genus + 1)
            .iter()
            .map(|&i| PrimePoly::new_unchecked(self.table.indexer().poly_at(i as usize)))
            .collect()
    }

    fn check(&self, p: &PrimePoly) -> Result<()> {
        self.field.check_same(p.field().q())?;
        if p.degree() != 2 * self.genus + 1 {
            return Err(Error::InvalidArgument(format!(
                "conductor of degree {} in a genus-{} context",
                p.degree(),
                self.genus
            )));
        }
        Ok(())
    }

    /// `χ_P` on every monic polynomial of degree `<= 2g + 1`.
    pub fn characters(&self, p: &PrimePoly) -> Result<Vec<i8>> {
        self.check(p)?;
        character_table(&self.table, p, self.orientation, 2 * self.genus + 1)
    }

    /// Per-degree sums `Σ_{deg f = n} w(f) χ_P(f)` for `n <= 2g + 1`.
    fn degree_sums(&self, chi: &[i8], weight: Option<&[u32]>) -> Vec<i64> {
        (0..=2 * self.genus + 1)
            .map(|n| {
                self.table
                    .degree_range(n)
                    .map(|i| chi[i] as i64 * weight.map_or(1, |w| w[i] as i64))
                    .sum()
            })
            .collect()
    }

    pub fn l_poly(&self, p: &PrimePoly) -> Result<LPolynomial> {
        let chi = self.characters(p)?;
        let c = self.degree_sums(&chi, None);
        let l = finish(p, self.genus, c, self.orientation)?;
        if !l.verify_functional_equation() {
            return Err(Error::Invariant(format!(
                "functional equation fails for conductor {} ({} orientation)",
                p.poly(),
                self.orientation
            )));
        }
        Ok(l)
    }

    /// `T_n = Σ_{deg f = n} τ(f) χ_P(f)` for `n <= 2g`.
    pub fn divisor_twisted_sums(&self, p: &PrimePoly) -> Result<Vec<i64>> {
        let chi = self.characters(p)?;
        let mut t = self.degree_sums(&chi, Some(&self.tau));
        t.truncate(2 * self.genus + 1);
        Ok(t)
    }

    /// L-polynomial together with `T_n`, from one character table.
    pub fn l_poly_and_divisor_sums(&self, p: &PrimePoly) -> Result<(LPolynomial, Vec<i64>)> {
        let chi = self.characters(p)?;
        let c = self.degree_sums(&chi, None);
        let l = finish(p, self.genus, c, self.orientation)?;
        if !l.verify_functional_equation() {
            return Err(Error::Invariant(format!(
                "functional equation fails for conductor {}",
                p.poly()
            )));
        }
        let mut t = self.degree_sums(&chi, Some(&self.tau));
        t.truncate(2 * self.genus + 1);
        Ok((l, t))
    }

    /// Applies `f` to every conductor in parallel; results keep index order.
    pub fn map_conductors<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&PrimePoly) -> Result<T> + Sync + Send,
    {
        self.conductors().par_iter().map(f).collect()
    }
}

/// Outcome of the squared approximate functional equation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AfeReport {
    /// Every Laurent coefficient agrees.
    pub coefficientwise: bool,
    /// The two sides agree at `u = 1`, and equal `L(1/2)²`.
    pub at_one: bool,
    pub central_squared: QuadValue,
    pub rhs_at_one: QuadValue,
}

impl AfeReport {
    pub fn holds(&self) -> bool {
        self.coefficientwise && self.at_one
    }
}

/// Compares `𝓛(u/√q)²` with
/// `Σ_{deg f ≤ 2g} τ(f)χ(f)u^{deg f}/√|f| + u^{4g} Σ_{deg f ≤ 2g-1} τ(f)χ(f)/(√|f| u^{deg f})`.
pub fn afe_square_check(l: &LPolynomial, t: &[i64]) -> AfeReport {
    let q = l.q();
    let g = l.genus();
    let c = l.coeffs();
    let mut coefficientwise = t.len() == 2 * g + 1;
    for m in 0..=4 * g {
        let lo = m.saturating_sub(2 * g);
        let hi = m.min(2 * g);
        let conv: i64 = (lo..=hi).map(|i| c[i] * c[m - i]).sum();
        let lhs = QuadValue::normalized(q, conv, m as u32);
        let rhs = if m <= 2 * g {
            QuadValue::normalized(q, t[m], m as u32)
        } else {
            let n = 4 * g - m;
            QuadValue::normalized(q, t[n], n as u32)
        };
        if lhs != rhs {
            coefficientwise = false;
        }
    }
    let first = (0..=2 * g).fold(QuadValue::zero(q), |acc, n| {
        &acc + &QuadValue::normalized(q, t[n], n as u32)
    });
    let second = (0..2 * g).fold(QuadValue::zero(q), |acc, n| {
        &acc + &QuadValue::normalized(q, t[n], n as u32)
    });
    let rhs_at_one = &first + &second;
    let cv = l.central_value();
    let central_squared = &cv * &cv;
    AfeReport {
        coefficientwise,
        at_one: rhs_at_one == central_squared,
        central_squared,
        rhs_at_one,
    }
}

/// For each orientation, whether the functional equation holds for `P`.
pub fn orientation_diagnostic(p: &PrimePoly) -> Result<Vec<(Orientation, bool)>> {
    let g = genus_of(p)?;
    [Orientation::Standard, Orientation::Literal]
        .into_iter()
        .map(|o| {
            let ctx = DirichletContext::new(p.field(), g, o)?;
            let chi = ctx.characters(p)?;
            let c = ctx.degree_sums(&chi, None);
            let ok = c[2 * g + 1] == 0
                && LPolynomial::from_parts(p.poly().clone(), g, c[..=2 * g].to_vec(), o)?
                    .verify_functional_equation();
            Ok((o, ok))
        })
        .collect()
}
