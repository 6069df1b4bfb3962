//! Quadratic residue symbols over `F_q[x]`.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::enumerate::FactorTable;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::{raw, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolValue {
    Minus,
    Zero,
    Plus,
}

impl SymbolValue {
    pub fn value(self) -> i8 {
        match self {
            SymbolValue::Minus => -1,
            SymbolValue::Zero => 0,
            SymbolValue::Plus => 1,
        }
    }

    pub fn from_i8(v: i8) -> Self {
        match v.signum() {
            -1 => SymbolValue::Minus,
            0 => SymbolValue::Zero,
            _ => SymbolValue::Plus,
        }
    }
}

impl Mul for SymbolValue {
    type Output = SymbolValue;
    fn mul(self, rhs: SymbolValue) -> SymbolValue {
        SymbolValue::from_i8(self.value() * rhs.value())
    }
}

impl fmt::Display for SymbolValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Which way round the character `χ_P` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `χ_P(f) = (f/P)`, the residue symbol of `f` modulo `P`.
    #[default]
    Standard,
    /// `χ_P(f) = (P/f)`, the Jacobi symbol with `f` as modulus.
    Literal,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Standard => write!(f, "standard"),
            Orientation::Literal => write!(f, "literal"),
        }
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Orientation::Standard),
            "literal" => Ok(Orientation::Literal),
            _ => Err(Error::InvalidArgument(format!("unknown orientation '{s}'"))),
        }
    }
}

/// A monic irreducible polynomial, checked once at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimePoly(Poly);

impl PrimePoly {
    pub fn new(p: Poly) -> Result<Self> {
        if !p.is_irreducible()? {
            return Err(Error::NotIrreducible("prime modulus"));
        }
        Ok(Self(p))
    }

    pub(crate) fn new_unchecked(p: Poly) -> Self {
        debug_assert!(p.is_irreducible().unwrap_or(false));
        Self(p)
    }

    pub fn poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }

    pub fn degree(&self) -> usize {
        self.0.deg().unwrap()
    }

    pub fn field(&self) -> FieldSpec {
        self.0.field()
    }

    /// `(f/P)` via Euler's criterion.
    pub fn euler(&self, f: &Poly) -> Result<SymbolValue> {
        self.field().check_same(f.q())?;
        let q = self.field().q();
        let e = (q as u128).pow(self.degree() as u32) / 2;
        let r = f.pow_mod(e, &self.0)?;
        match r.coeffs() {
            [] => Ok(SymbolValue::Zero),
            [1] => Ok(SymbolValue::Plus),
            [c] if *c == q - 1 => Ok(SymbolValue::Minus),
            _ => Err(Error::Invariant(format!(
                "Euler criterion produced {r} modulo {}",
                self.0
            ))),
        }
    }

    /// `χ_P(f)` in the requested orientation.
    pub fn chi(&self, f: &Poly, orientation: Orientation) -> Result<SymbolValue> {
        self.field().check_same(f.q())?;
        match orientation {
            Orientation::Standard => Ok(SymbolValue::from_i8(jacobi_raw(
                f.coeffs(),
                self.0.coeffs(),
                &self.field(),
            ))),
            Orientation::Literal => jacobi_symbol(&self.0, f),
        }
    }

    /// `-1` when the two orientations differ by `(-1)^{deg f}` on monic `f`,
    /// `+1` when they agree.
    pub fn orientation_twist(&self) -> i8 {
        if self.field().reciprocity_twisted() && self.degree() % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

/// `(f/P)` via Euler's criterion, validating `P`.
pub fn euler_symbol(f: &Poly, p: &Poly) -> Result<SymbolValue> {
    PrimePoly::new(p.clone())?.euler(f)
}

/// Jacobi symbol `(a/m)` for monic `m`, by reciprocity.
pub fn jacobi_symbol(a: &Poly, m: &Poly) -> Result<SymbolValue> {
    a.field().check_same(m.q())?;
    if m.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if !m.is_monic() {
        return Err(Error::NotMonic("jacobi modulus"));
    }
    Ok(SymbolValue::from_i8(jacobi_raw(
        a.coeffs(),
        m.coeffs(),
        &a.field(),
    )))
}

/// Reciprocity loop on trimmed coefficient vectors; `m` must be monic.
pub(crate) fn jacobi_raw(a: &[u32], m: &[u32], field: &FieldSpec) -> i8 {
    let twisted = field.reciprocity_twisted();
    let mut a = a.to_vec();
    let mut m = m.to_vec();
    let mut sign = 1i8;
    loop {
        let dm = m.len() - 1;
        if dm == 0 {
            return sign;
        }
        raw::rem_monic(&mut a, &m, field);
        let Some(&lc) = a.last() else {
            return 0;
        };
        if lc != 1 {
            if dm % 2 == 1 {
                sign *= field.legendre(lc);
            }
            let inv = field.inv(lc).unwrap();
            raw::scale(&mut a, inv, field);
        }
        let da = a.len() - 1;
        if da == 0 {
            return sign;
        }
        if twisted && da % 2 == 1 && dm % 2 == 1 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut m);
    }
}

/// `χ_P` on every monic polynomial of degree `<= upto` in `table`, evaluated
/// on the primes and extended multiplicatively.
pub fn character_table(
    table: &FactorTable,
    p: &PrimePoly,
    orientation: Orientation,
    upto: usize,
) -> Result<Vec<i8>> {
    table.field().check_same(p.field().q())?;
    let upto = upto.min(table.max_degree());
    let field = p.field();
    let pc = p.poly().coeffs();
    let twist = match orientation {
        Orientation::Standard => 1,
        Orientation::Literal => p.orientation_twist(),
    };
    let ix = table.indexer();
    let mut on_primes = vec![0i8; table.primes().len()];
    for d in 1..=upto {
        let s = if d % 2 == 1 { twist } else { 1 };
        for pos in table.prime_positions(d) {
            let idx = table.primes()[pos] as usize;
            on_primes[pos] = s * jacobi_raw(&ix.coeffs_at(idx), pc, &field);
        }
    }
    Ok(table.extend_character(&on_primes, upto))
}
