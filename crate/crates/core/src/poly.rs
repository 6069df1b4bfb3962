//! Dense polynomials over `F_q`, lowest degree first.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Degree of a polynomial. The zero polynomial has its own sentinel so that
/// it never takes part in ordinary integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial over `F_q`. Coefficients are reduced residues, stored lowest
/// degree first with no trailing zeros.
#[derive(Clone)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Vec<u32>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.field.q() == other.field.q() && self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.q().hash(state);
        self.coeffs.hash(state);
    }
}

/// Serialised as its coefficient list, lowest degree first.
impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[q={}]({})", self.field.q(), self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Slice-level kernels shared by the hot loops of the sweeps. Vectors are
/// kept trimmed (no trailing zeros); the empty vector is zero.
pub(crate) mod raw {
    use crate::field::FieldSpec;

    #[inline]
    pub fn trim(v: &mut Vec<u32>) {
        while let Some(&0) = v.last() {
            v.pop();
        }
    }

    /// `a mod m` in place, `m` monic and nonempty.
    #[inline]
    pub fn rem_monic(a: &mut Vec<u32>, m: &[u32], f: &FieldSpec) {
        let dm = m.len() - 1;
        let q = f.q() as u64;
        while a.len() > dm {
            let top = a.len() - 1;
            let c = a[top] as u64;
            if c != 0 {
                let base = top - dm;
                for j in 0..dm {
                    let mj = m[j] as u64;
                    if mj != 0 {
                        let t = (c * mj) % q;
                        let v = a[base + j] as u64 + q - t;
                        a[base + j] = (v % q) as u32;
                    }
                }
            }
            a.pop();
            trim(a);
        }
    }

    pub fn mul(a: &[u32], b: &[u32], f: &FieldSpec) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let q = f.q() as u64;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % q;
            }
        }
        let mut v: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut v);
        v
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], f: &FieldSpec) -> Vec<u32> {
        let mut p = mul(a, b, f);
        rem_monic(&mut p, m, f);
        p
    }

    pub fn scale(a: &mut [u32], c: u32, f: &FieldSpec) {
        for x in a.iter_mut() {
            *x = f.mul(*x, c);
        }
    }

    /// `base^e mod m` with `m` monic.
    pub fn pow_mod(base: &[u32], mut e: u128, m: &[u32], f: &FieldSpec) -> Vec<u32> {
        let mut b = base.to_vec();
        rem_monic(&mut b, m, f);
        let mut r: Vec<u32> = vec![1];
        rem_monic(&mut r, m, f);
        while e > 0 {
            if e & 1 == 1 {
                r = mul_mod(&r, &b, m, f);
            }
            e >>= 1;
            if e > 0 {
                b = mul_mod(&b, &b, m, f);
            }
        }
        r
    }
}

impl Poly {
    /// Builds a polynomial from signed integer coefficients, lowest degree first.
    pub fn new(field: FieldSpec, coeffs: &[i64]) -> Self {
        let coeffs = coeffs.iter().map(|&c| field.reduce(c)).collect();
        Self::from_residues(field, coeffs)
    }

    pub fn from_residues(field: FieldSpec, mut coeffs: Vec<u32>) -> Self {
        let q = field.q();
        for c in coeffs.iter_mut() {
            *c %= q;
        }
        raw::trim(&mut coeffs);
        Self { field, coeffs }
    }

    pub fn zero(field: FieldSpec) -> Self {
        Self {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: FieldSpec) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: FieldSpec, c: u32) -> Self {
        Self::from_residues(field, vec![c])
    }

    /// The variable `x`.
    pub fn x(field: FieldSpec) -> Self {
        Self::from_residues(field, vec![0, 1])
    }

    /// The monic polynomial `x^n + Σ low[i] x^i`.
    pub fn monic_from_low(field: FieldSpec, low: &[u32]) -> Self {
        let mut c = low.to_vec();
        c.push(1);
        Self::from_residues(field, c)
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.field.q()
    }

    #[inline]
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree as a plain integer, `None` for the zero polynomial.
    #[inline]
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<u32> {
        self.coeffs.last().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(1)
    }

    /// `|f| = q^{deg f}`; `None` for zero or on overflow.
    pub fn norm(&self) -> Option<u128> {
        let d = self.deg()?;
        (self.q() as u128).checked_pow(d as u32)
    }

    fn same_field(&self, other: &Poly) -> Result<()> {
        self.field.check_same(other.q())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.field.add(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(Self::from_residues(self.field, c))
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.field.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(Self::from_residues(self.field, c))
    }

    pub fn neg(&self) -> Poly {
        let c = self.coeffs.iter().map(|&a| self.field.neg(a)).collect();
        Self::from_residues(self.field, c)
    }

    pub fn scale(&self, c: u32) -> Poly {
        let mut v = self.coeffs.clone();
        raw::scale(&mut v, c % self.q(), &self.field);
        Self::from_residues(self.field, v)
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        Ok(Self {
            field: self.field,
            coeffs: raw::mul(&self.coeffs, &other.coeffs, &self.field),
        })
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one(self.field);
        for _ in 0..e {
            r = Poly {
                field: self.field,
                coeffs: raw::mul(&r.coeffs, &self.coeffs, &self.field),
            };
        }
        r
    }

    /// Leading coefficient and the monic associate. Zero maps to `(0, 0)`.
    pub fn make_monic(&self) -> (u32, Poly) {
        match self.leading() {
            None => (0, self.clone()),
            Some(lc) => {
                let inv = self.field.inv(lc).expect("nonzero leading coefficient");
                (lc, self.scale(inv))
            }
        }
    }

    /// Euclidean division: `self = s·g + r` with `deg r < deg g`.
    pub fn divmod(&self, g: &Poly) -> Result<(Poly, Poly)> {
        self.same_field(g)?;
        let dg = g.deg().ok_or(Error::DivisionByZero)?;
        let f = &self.field;
        let inv = f.inv(g.leading().unwrap()).unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dg {
            return Ok((Poly::zero(*f), self.clone()));
        }
        let mut s = vec![0u32; r.len() - dg];
        while r.len() > dg {
            let top = r.len() - 1;
            let c = f.mul(r[top], inv);
            let shift = top - dg;
            s[shift] = c;
            for j in 0..=dg {
                let t = f.mul(c, g.coeffs[j]);
                r[shift + j] = f.sub(r[shift + j], t);
            }
            debug_assert_eq!(r[top], 0);
            r.pop();
            raw::trim(&mut r);
        }
        Ok((Self::from_residues(*f, s), Self::from_residues(*f, r)))
    }

    pub fn rem(&self, g: &Poly) -> Result<Poly> {
        Ok(self.divmod(g)?.1)
    }

    /// Monic gcd; zero only when both inputs are zero.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.make_monic().1)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: u128, m: &Poly) -> Result<Poly> {
        self.same_field(m)?;
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (_, mm) = m.make_monic();
        Ok(Self::from_residues(
            self.field,
            raw::pow_mod(&self.coeffs, e, &mm.coeffs, &self.field),
        ))
    }

    pub fn derivative(&self) -> Poly {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| self.field.mul(a, (i as u64 % self.q() as u64) as u32))
            .collect();
        Self::from_residues(self.field, c)
    }

    pub fn eval(&self, x: u32) -> u32 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.field.add(self.field.mul(acc, x), c))
    }

    fn require_monic_nonconstant(&self, what: &'static str) -> Result<usize> {
        if !self.is_monic() {
            return Err(Error::NotMonic(what));
        }
        match self.deg() {
            Some(d) if d >= 1 => Ok(d),
            _ => Err(Error::InvalidArgument(format!(
                "{what}: polynomial must have degree >= 1"
            ))),
        }
    }

    /// Deterministic irreducibility test: `x^{q^n} ≡ x (mod f)` and
    /// `gcd(x^{q^{n/r}} - x, f) = 1` for every prime `r | n`.
    pub fn is_irreducible(&self) -> Result<bool> {
        self.require_monic_nonconstant("is_irreducible")?;
        Ok(irreducible_raw(&self.coeffs, &self.field))
    }

    /// Trial-division irreducibility, used as an oracle for small degrees.
    pub fn is_irreducible_trial(&self) -> Result<bool> {
        let n = self.require_monic_nonconstant("is_irreducible_trial")?;
        for d in 1..=n / 2 {
            for g in crate::enumerate::enumerate_monic(self.field, d) {
                if self.rem(&g)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Factorisation of a monic polynomial by trial division against monic
    /// polynomials of increasing degree. Factors are returned in increasing
    /// (degree, coefficient) order.
    pub fn factor(&self) -> Result<Vec<(Poly, u32)>> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("cannot factor zero".into()));
        }
        if !self.is_monic() {
            return Err(Error::NotMonic("factor"));
        }
        let mut rest = self.clone();
        let mut out = Vec::new();
        let mut d = 1;
        while rest.deg().unwrap() >= 2 * d {
            for g in crate::enumerate::enumerate_monic(self.field, d) {
                let mut e = 0;
                loop {
                    let (s, r) = rest.divmod(&g)?;
                    if !r.is_zero() {
                        break;
                    }
                    rest = s;
                    e += 1;
                }
                if e > 0 {
                    out.push((g, e));
                }
            }
            d += 1;
        }
        if rest.deg().unwrap() >= 1 {
            match out.iter_mut().find(|(g, _)| *g == rest) {
                Some(entry) => entry.1 += 1,
                None => out.push((rest, 1)),
            }
        }
        out.sort_by(|a, b| {
            (a.0.deg(), a.0.coeffs.iter().rev().collect::<Vec<_>>())
                .cmp(&(b.0.deg(), b.0.coeffs.iter().rev().collect::<Vec<_>>()))
        });
        Ok(out)
    }

    /// Whether a monic polynomial is the square of a monic polynomial.
    pub fn is_perfect_square(&self) -> Result<bool> {
        Ok(self.factor()?.iter().all(|(_, e)| e % 2 == 0))
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test on a trimmed monic coefficient vector of degree `>= 1`.
pub(crate) fn irreducible_raw(f: &[u32], field: &FieldSpec) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    let q = field.q() as u128;
    let x = {
        let mut v = vec![0, 1];
        raw::rem_monic(&mut v, f, field);
        v
    };
    // frob[k] = x^{q^k} mod f
    let mut frob = Vec::with_capacity(n + 1);
    frob.push(x.clone());
    for k in 1..=n {
        let next = raw::pow_mod(&frob[k - 1], q, f, field);
        frob.push(next);
    }
    if frob[n] != x {
        return false;
    }
    let fp = Poly::from_residues(*field, f.to_vec());
    let xp = Poly::from_residues(*field, x);
    for r in prime_divisors(n) {
        let h = Poly::from_residues(*field, frob[n / r].clone());
        let g = h.sub(&xp).unwrap().gcd(&fp).unwrap();
        if !g.is_one() {
            return false;
        }
    }
    true
}
