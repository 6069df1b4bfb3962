//! Enumeration of monic polynomials, prime counting, and a factor sieve over
//! all monic polynomials up to a fixed degree.
//!
//! Monic polynomials of degree `n` are indexed by `Σ_{i<n} c_i q^i`, so the
//! constant coefficient varies fastest. The global index of a monic
//! polynomial of degree `n` is that value plus `(q^n - 1)/(q - 1)`, the number
//! of monic polynomials of smaller degree.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::{raw, Poly};

/// Iterator over the monic polynomials of one exact degree.
#[derive(Debug, Clone)]
pub struct MonicIter {
    field: FieldSpec,
    low: Vec<u32>,
    done: bool,
}

impl Iterator for MonicIter {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.done {
            return None;
        }
        let out = Poly::monic_from_low(self.field, &self.low);
        let q = self.field.q();
        let mut i = 0;
        loop {
            if i == self.low.len() {
                self.done = true;
                break;
            }
            self.low[i] += 1;
            if self.low[i] < q {
                break;
            }
            self.low[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

/// All monic polynomials of degree exactly `n`, `q^n` of them.
pub fn enumerate_monic(field: FieldSpec, n: usize) -> MonicIter {
    MonicIter {
        field,
        low: vec![0; n],
        done: false,
    }
}

/// All monic polynomials of degree at most `n`, by increasing degree.
pub fn enumerate_monic_upto(field: FieldSpec, n: usize) -> impl Iterator<Item = Poly> {
    (0..=n).flat_map(move |d| enumerate_monic(field, d))
}

/// The monic irreducible polynomials of degree `n`.
pub fn enumerate_irreducible(field: FieldSpec, n: usize) -> Result<impl Iterator<Item = Poly>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "irreducible polynomials have degree >= 1".into(),
        ));
    }
    Ok(enumerate_monic(field, n).filter(|p| crate::poly::irreducible_raw(p.coeffs(), &p.field())))
}

/// Largest `q^n` accepted by [`sieve_irreducible`].
pub const SIEVE_CAP: u128 = 100_000_000;

/// Primality of every monic polynomial of degree `n`, indexed by
/// `Σ_{i<n} c_i q^i`: each product of a monic prime of degree `d ≤ n/2` with
/// a monic cofactor of degree `n - d` is crossed out.
pub fn sieve_irreducible(field: FieldSpec, n: usize) -> Result<Vec<bool>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "irreducible polynomials have degree >= 1".into(),
        ));
    }
    let q = field.q() as usize;
    let size = (q as u128)
        .checked_pow(n as u32)
        .filter(|&s| s <= SIEVE_CAP)
        .ok_or_else(|| Error::Infeasible {
            what: format!("sieving the monic polynomials of degree {n} over F_{q}"),
            estimate: format!("{q}^{n} entries"),
        })? as usize;
    let mut prime = vec![true; size];
    let mut prod = vec![0u64; n + 1];
    for d in 1..=n / 2 {
        let small = sieve_irreducible(field, d)?;
        for (pi, _) in small.iter().enumerate().filter(|(_, &p)| p) {
            let p = digits(pi, q, d, true);
            let mut cof = vec![0u32; n - d];
            loop {
                prod.iter_mut().for_each(|c| *c = 0);
                for (i, &a) in p.iter().enumerate() {
                    for j in 0..=n - d {
                        let b = if j == n - d { 1 } else { cof[j] };
                        prod[i + j] += a as u64 * b as u64;
                    }
                }
                let idx = prod[..n]
                    .iter()
                    .rev()
                    .fold(0usize, |acc, &c| acc * q + (c % q as u64) as usize);
                prime[idx] = false;
                if !advance(&mut cof, q as u32) {
                    break;
                }
            }
        }
    }
    Ok(prime)
}

/// Base-`q` digits of `idx`, lowest first, with a leading 1 when `monic`.
fn digits(mut idx: usize, q: usize, n: usize, monic: bool) -> Vec<u32> {
    let mut out = Vec::with_capacity(n + 1);
    for _ in 0..n {
        out.push((idx % q) as u32);
        idx /= q;
    }
    if monic {
        out.push(1);
    }
    out
}

fn advance(low: &mut [u32], q: u32) -> bool {
    for c in low.iter_mut() {
        *c += 1;
        if *c < q {
            return true;
        }
        *c = 0;
    }
    false
}

pub(crate) fn mobius(n: usize) -> i64 {
    let mut m = n;
    let mut r = 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            r = -r;
        }
        d += 1;
    }
    if m > 1 {
        r = -r;
    }
    r
}

/// Number of monic irreducible polynomials of degree `n`:
/// `(1/n) Σ_{d | n} μ(d) q^{n/d}`. Returns 0 for `n = 0`.
pub fn count_irreducible(field: FieldSpec, n: usize) -> u128 {
    if n == 0 {
        return 0;
    }
    let q = field.q() as i128;
    let total: i128 = (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| mobius(d) as i128 * q.pow((n / d) as u32))
        .sum();
    (total / n as i128) as u128
}

/// Number of monic divisors of a monic nonzero polynomial.
pub fn tau(f: &Poly) -> Result<u64> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("tau of the zero polynomial".into()));
    }
    Ok(f.factor()?.iter().map(|(_, e)| *e as u64 + 1).product())
}

/// Bijection between monic polynomials of degree `<= max_degree` and
/// `0..len`.
#[derive(Debug, Clone)]
pub struct MonicIndexer {
    field: FieldSpec,
    max_degree: usize,
    offsets: Vec<usize>,
}

impl MonicIndexer {
    pub fn new(field: FieldSpec, max_degree: usize) -> Result<Self> {
        let q = field.q() as usize;
        let mut offsets = Vec::with_capacity(max_degree + 2);
        let mut acc = 0usize;
        let mut block = 1usize;
        for _ in 0..=max_degree {
            offsets.push(acc);
            acc = acc
                .checked_add(block)
                .ok_or_else(|| infeasible(field, max_degree))?;
            block = block
                .checked_mul(q)
                .ok_or_else(|| infeasible(field, max_degree))?;
        }
        offsets.push(acc);
        Ok(Self {
            field,
            max_degree,
            offsets,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.offsets[self.max_degree + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Global index range of the monic polynomials of degree `n`.
    pub fn degree_range(&self, n: usize) -> Range<usize> {
        self.offsets[n]..self.offsets[n + 1]
    }

    pub fn degree_of(&self, idx: usize) -> usize {
        self.offsets.partition_point(|&o| o <= idx) - 1
    }

    pub fn index_of(&self, f: &Poly) -> Option<usize> {
        if !f.is_monic() || f.q() != self.field.q() {
            return None;
        }
        self.index_of_raw(f.coeffs())
    }

    /// Index of a trimmed monic coefficient vector.
    pub fn index_of_raw(&self, c: &[u32]) -> Option<usize> {
        let n = c.len().checked_sub(1)?;
        if n > self.max_degree {
            return None;
        }
        let q = self.field.q() as usize;
        let low = c[..n]
            .iter()
            .rev()
            .fold(0usize, |acc, &x| acc * q + x as usize);
        Some(self.offsets[n] + low)
    }

    /// Coefficient vector (trimmed, monic) of the polynomial at `idx`.
    pub fn coeffs_at(&self, idx: usize) -> Vec<u32> {
        let n = self.degree_of(idx);
        let q = self.field.q() as usize;
        let mut low = idx - self.offsets[n];
        let mut c = Vec::with_capacity(n + 1);
        for _ in 0..n {
            c.push((low % q) as u32);
            low /= q;
        }
        c.push(1);
        c
    }

    pub fn poly_at(&self, idx: usize) -> Poly {
        Poly::from_residues(self.field, self.coeffs_at(idx))
    }
}

fn infeasible(field: FieldSpec, n: usize) -> Error {
    Error::Infeasible {
        what: format!("monic table of degree <= {n} over F_{}", field.q()),
        estimate: format!("{}^{n} entries", field.q()),
    }
}

/// Largest table the sieve will build.
pub const FACTOR_TABLE_CAP: usize = 2_500_000;

const NONE: u32 = u32::MAX;

/// Smallest-prime-factor sieve over every monic polynomial of degree
/// `<= max_degree`. "Smallest" refers to the global index order.
#[derive(Debug, Clone)]
pub struct FactorTable {
    ix: MonicIndexer,
    spf: Vec<u32>,
    cof: Vec<u32>,
    exp: Vec<u8>,
    rest: Vec<u32>,
    primes: Vec<u32>,
    prime_offsets: Vec<usize>,
}

impl FactorTable {
    pub fn new(field: FieldSpec, max_degree: usize) -> Result<Self> {
        let ix = MonicIndexer::new(field, max_degree)?;
        let len = ix.len();
        if len > FACTOR_TABLE_CAP {
            return Err(Error::Infeasible {
                what: format!(
                    "factor table of degree <= {max_degree} over F_{}",
                    field.q()
                ),
                estimate: format!("{len} entries (cap {FACTOR_TABLE_CAP})"),
            });
        }
        let mut spf = vec![NONE; len];
        let mut cof = vec![NONE; len];
        let mut primes = Vec::new();
        let mut prime_offsets = vec![0usize; max_degree + 2];
        for idx in 1..len {
            if spf[idx] != NONE {
                continue;
            }
            spf[idx] = idx as u32;
            cof[idx] = 0;
            primes.push(idx as u32);
            let dp = ix.degree_of(idx);
            let pc = ix.coeffs_at(idx);
            for k in 1..=max_degree.saturating_sub(dp) {
                for j in ix.degree_range(k) {
                    let s = spf[j];
                    if s != NONE && (s as usize) < idx {
                        continue;
                    }
                    let jc = ix.coeffs_at(j);
                    let prod = raw::mul(&pc, &jc, &field);
                    let t = ix.index_of_raw(&prod).unwrap();
                    if spf[t] == NONE {
                        spf[t] = idx as u32;
                        cof[t] = j as u32;
                    }
                }
            }
        }
        for n in 0..=max_degree + 1 {
            prime_offsets[n] = primes.partition_point(|&p| (p as usize) < ix.offsets[n]);
        }
        let mut exp = vec![0u8; len];
        let mut rest = vec![0u32; len];
        for idx in 1..len {
            let c = cof[idx] as usize;
            if c != 0 && spf[c] == spf[idx] {
                exp[idx] = exp[c] + 1;
                rest[idx] = rest[c];
            } else {
                exp[idx] = 1;
                rest[idx] = c as u32;
            }
        }
        Ok(Self {
            ix,
            spf,
            cof,
            exp,
            rest,
            primes,
            prime_offsets,
        })
    }

    pub fn indexer(&self) -> &MonicIndexer {
        &self.ix
    }

    pub fn field(&self) -> FieldSpec {
        self.ix.field
    }

    pub fn max_degree(&self) -> usize {
        self.ix.max_degree
    }

    pub fn len(&self) -> usize {
        self.spf.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degree_range(&self, n: usize) -> Range<usize> {
        self.ix.degree_range(n)
    }

    pub fn is_prime(&self, idx: usize) -> bool {
        idx != 0 && self.spf[idx] as usize == idx
    }

    /// Global indices of all primes, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn primes_of_degree(&self, n: usize) -> &[u32] {
        &self.primes[self.prime_offsets[n]..self.prime_offsets[n + 1]]
    }

    /// Position range within [`Self::primes`] of the primes of degree `n`.
    pub fn prime_positions(&self, n: usize) -> Range<usize> {
        self.prime_offsets[n]..self.prime_offsets[n + 1]
    }

    /// Smallest prime factor, its exponent, and the cofactor with that prime
    /// removed completely. `None` for the polynomial 1.
    pub fn split(&self, idx: usize) -> Option<(usize, u32, usize)> {
        if idx == 0 {
            return None;
        }
        Some((
            self.spf[idx] as usize,
            self.exp[idx] as u32,
            self.rest[idx] as usize,
        ))
    }

    /// The cofactor `f / spf(f)`.
    pub fn cofactor(&self, idx: usize) -> usize {
        self.cof[idx] as usize
    }

    /// Factorisation as `(prime index, exponent)` pairs.
    pub fn factor(&self, mut idx: usize) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        while let Some((p, e, r)) = self.split(idx) {
            out.push((p, e));
            idx = r;
        }
        out
    }

    /// Tabulates a multiplicative function from its values on prime powers.
    pub fn multiplicative<T, F, M>(&self, one: T, prime_power: F, mul: M) -> Vec<T>
    where
        T: Clone,
        F: Fn(usize, u32) -> T,
        M: Fn(&T, &T) -> T,
    {
        let mut out: Vec<T> = Vec::with_capacity(self.len());
        out.push(one);
        for idx in 1..self.len() {
            let (p, e, r) = self.split(idx).unwrap();
            let v = mul(&prime_power(p, e), &out[r]);
            out.push(v);
        }
        out
    }

    /// Extends a completely multiplicative `{-1, 0, 1}`-valued function from
    /// its values on the primes (given in [`Self::primes`] order) to the whole
    /// table. Only the first `upto` degrees are filled; the rest are zero.
    pub fn extend_character(&self, on_primes: &[i8], upto: usize) -> Vec<i8> {
        let end = self.ix.offsets[upto.min(self.max_degree()) + 1];
        let mut out = vec![0i8; end];
        out[0] = 1;
        let mut pos = 0usize;
        for idx in 1..end {
            let p = self.spf[idx] as usize;
            if p == idx {
                while self.primes[pos] as usize != idx {
                    pos += 1;
                }
                out[idx] = on_primes[pos];
            } else {
                out[idx] = out[p] * out[self.cof[idx] as usize];
            }
        }
        out
    }

    /// `τ(f)` for every entry.
    pub fn tau_table(&self) -> Vec<u32> {
        self.multiplicative(1u32, |_, e| e + 1, |a, b| a * b)
    }

    /// `τ(f²)` for every entry.
    pub fn tau_square_table(&self) -> Vec<u32> {
        self.multiplicative(1u32, |_, e| 2 * e + 1, |a, b| a * b)
    }

    /// Whether each entry is a perfect square.
    pub fn square_table(&self) -> Vec<bool> {
        self.multiplicative(true, |_, e| e % 2 == 0, |a, b| *a && *b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    #[test]
    fn monic_enumeration_examples() {
        let k = f(3);
        let lin: Vec<_> = enumerate_monic(k, 1).collect();
        assert_eq!(
            lin,
            vec![
                Poly::new(k, &[0, 1]),
                Poly::new(k, &[1, 1]),
                Poly::new(k, &[2, 1])
            ]
        );
        assert_eq!(enumerate_monic(k, 2).count(), 9);
        assert_eq!(
            enumerate_monic(f(5), 0).collect::<Vec<_>>(),
            vec![Poly::one(f(5))]
        );
    }

    #[test]
    fn irreducible_examples() {
        assert_eq!(enumerate_irreducible(f(3), 2).unwrap().count(), 3);
        assert_eq!(enumerate_irreducible(f(5), 1).unwrap().count(), 5);
        assert_eq!(enumerate_irreducible(f(3), 3).unwrap().count(), 8);
        assert!(enumerate_irreducible(f(3), 0).is_err());
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_irreducible(f(3), 4), 18);
        assert_eq!(count_irreducible(f(5), 2), 10);
        assert_eq!(count_irreducible(f(3), 1), 3);
    }

    #[test]
    fn necklace_identity() {
        for q in [3u32, 5, 7] {
            for n in 1..=10usize {
                let s: u128 = (1..=n)
                    .filter(|d| n % d == 0)
                    .map(|d| d as u128 * count_irreducible(f(q), d))
                    .sum();
                assert_eq!(s, (q as u128).pow(n as u32));
            }
        }
    }

    #[test]
    fn tau_examples() {
        let k = f(3);
        assert_eq!(tau(&Poly::one(k)).unwrap(), 1);
        let p = Poly::new(k, &[1, 0, 1]);
        assert_eq!(tau(&p.pow(2)).unwrap(), 3);
        let p2 = Poly::new(k, &[0, 1]);
        assert_eq!(tau(&p.mul(&p2).unwrap()).unwrap(), 4);
        assert!(tau(&Poly::zero(k)).is_err());
    }

    #[test]
    fn tau_multiplicative_on_coprime_pairs() {
        let k = f(3);
        let all: Vec<_> = enumerate_monic_upto(k, 2).collect();
        for a in &all {
            for b in &all {
                if a.gcd(b).unwrap().is_one() {
                    let ab = a.mul(b).unwrap();
                    assert_eq!(tau(&ab).unwrap(), tau(a).unwrap() * tau(b).unwrap());
                }
            }
        }
    }

    #[test]
    fn tau_counts_ordered_factorisations() {
        let k = f(3);
        let all: Vec<_> = enumerate_monic_upto(k, 3).collect();
        for target in enumerate_monic_upto(k, 3) {
            let mut n = 0;
            for a in &all {
                if target.rem(a).unwrap().is_zero() {
                    n += 1;
                }
            }
            assert_eq!(tau(&target).unwrap(), n);
        }
    }

    #[test]
    fn indexer_round_trip() {
        let ix = MonicIndexer::new(f(5), 3).unwrap();
        assert_eq!(ix.len(), 1 + 5 + 25 + 125);
        for (i, p) in enumerate_monic_upto(f(5), 3).enumerate() {
            assert_eq!(ix.index_of(&p), Some(i));
            assert_eq!(ix.poly_at(i), p);
        }
        assert_eq!(ix.index_of(&Poly::new(f(5), &[1, 2])), None);
    }

    #[test]
    fn sieve_agrees_with_rabin() {
        for (q, n) in [(3u32, 6usize), (5, 4), (7, 3)] {
            let t = FactorTable::new(f(q), n).unwrap();
            for d in 1..=n {
                assert_eq!(
                    t.primes_of_degree(d).len() as u128,
                    count_irreducible(f(q), d)
                );
                for &p in t.primes_of_degree(d) {
                    assert!(t.indexer().poly_at(p as usize).is_irreducible().unwrap());
                }
            }
        }
    }

    #[test]
    fn sieve_factorisation_reconstructs() {
        let k = f(3);
        let t = FactorTable::new(k, 5).unwrap();
        for idx in 0..t.len() {
            let back = t.factor(idx).iter().fold(Poly::one(k), |acc, &(p, e)| {
                acc.mul(&t.indexer().poly_at(p).pow(e)).unwrap()
            });
            assert_eq!(back, t.indexer().poly_at(idx));
        }
        let taus = t.tau_table();
        for idx in (0..t.len()).step_by(7) {
            assert_eq!(taus[idx] as u64, tau(&t.indexer().poly_at(idx)).unwrap());
        }
    }

    #[test]
    fn oversized_table_is_infeasible() {
        assert!(matches!(
            FactorTable::new(f(7), 9),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn crossing_out_matches_rabin_test() {
        for (q, n_max) in [(3, 6), (5, 4), (7, 3)] {
            let field = FieldSpec::new(q).unwrap();
            for n in 1..=n_max {
                let sieve = sieve_irreducible(field, n).unwrap();
                for (i, f) in enumerate_monic(field, n).enumerate() {
                    assert_eq!(sieve[i], f.is_irreducible().unwrap(), "{f}");
                }
                let count = sieve.iter().filter(|&&p| p).count() as u128;
                assert_eq!(count, count_irreducible(field, n));
            }
        }
        assert!(sieve_irreducible(FieldSpec::new(3).unwrap(), 0).is_err());
    }
}
