//! Frobenius traces `a_Q` and the Hecke coefficients `a(f)`, `λ(f)`.

use rayon::prelude::*;

use super::extfield::{ExtField, ZERO};
use super::EllipticCurve;
use crate::enumerate::{enumerate_monic, FactorTable};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quad::QuadValue;
use crate::symbol::PrimePoly;

/// `a_Q = |Q| + 1 - #E(F_q[t]/Q)` by enumerating every `(x, y)`; a slow
/// oracle for small `|Q|`.
pub fn brute_force_trace(curve: &EllipticCurve, qp: &PrimePoly) -> Result<i64> {
    let field = curve.field();
    let p = qp.poly();
    let d = qp.degree();
    let a = curve.a().rem(p)?;
    let b = curve.b().rem(p)?;
    let residues: Vec<Poly> = (0..d)
        .flat_map(|k| {
            enumerate_monic(field, k).flat_map(move |m| (1..field.q()).map(move |c| m.scale(c)))
        })
        .chain(std::iter::once(Poly::zero(field)))
        .collect();
    let squares: Vec<Poly> = residues
        .iter()
        .map(|y| y.mul(y).and_then(|s| s.rem(p)))
        .collect::<Result<_>>()?;
    let mut affine = 0i64;
    for x in &residues {
        let rhs = x.pow(3).add(&a.mul(x)?)?.add(&b)?.rem(p)?;
        affine += squares.iter().filter(|s| **s == rhs).count() as i64;
    }
    let size = residues.len() as i64;
    Ok(size + 1 - (affine + 1))
}

/// Traces of Frobenius for every prime of degree `<= max_degree`, and the
/// unnormalised coefficients `a(f) = √|f| λ(f)` of every monic `f` of degree
/// `<= max_degree`.
#[derive(Debug, Clone)]
pub struct CurveTables {
    curve: EllipticCurve,
    table: FactorTable,
    trace: Vec<i64>,
    bad: Vec<bool>,
    coeffs: Vec<i64>,
}

impl CurveTables {
    pub fn new(curve: EllipticCurve, max_degree: usize) -> Result<Self> {
        let field = curve.field();
        let table = FactorTable::new(field, max_degree)?;
        let np = table.primes().len();
        let mut trace = vec![i64::MIN; np];
        let mut bad = vec![false; np];
        for d in 1..=max_degree {
            let r = table
                .indexer()
                .poly_at(table.primes_of_degree(d)[0] as usize);
            let k = ExtField::new(&r)?;
            let mut reps: Vec<u32> = (0..k.order())
                .filter(|&l| {
                    let (size, least) = k.orbit(l);
                    size == d && least
                })
                .collect();
            if d == 1 {
                reps.push(ZERO);
            }
            let results: Vec<(usize, i64, bool)> = reps
                .par_iter()
                .map(|&l| {
                    let mp = if l == ZERO {
                        vec![0, 1]
                    } else {
                        k.minimal_polynomial(l)
                    };
                    let idx = table.indexer().index_of_raw(&mp).unwrap();
                    let pos = table.primes().binary_search(&(idx as u32)).unwrap();
                    let (la, lb) = if l == ZERO {
                        (
                            k.log_const(curve.a().coeff(0)),
                            k.log_const(curve.b().coeff(0)),
                        )
                    } else {
                        (k.eval(curve.a(), l), k.eval(curve.b(), l))
                    };
                    let is_bad = if l == ZERO {
                        curve.delta().coeff(0) == 0
                    } else {
                        k.eval(curve.delta(), l) == ZERO
                    };
                    (pos, k.curve_trace(la, lb), is_bad)
                })
                .collect();
            for (pos, tr, is_bad) in results {
                trace[pos] = tr;
                bad[pos] = is_bad;
            }
        }
        let q = field.q() as i64;
        for (pos, &tr) in trace.iter().enumerate() {
            let idx = table.primes()[pos] as usize;
            let d = table.indexer().degree_of(idx) as u32;
            if tr == i64::MIN {
                return Err(Error::Invariant(format!(
                    "no trace computed for prime {}",
                    table.indexer().poly_at(idx)
                )));
            }
            let ok = if bad[pos] {
                tr.abs() <= 1
            } else {
                (tr as i128).pow(2) <= 4 * (q as i128).pow(d)
            };
            if !ok {
                return Err(Error::Invariant(format!(
                    "trace {tr} out of range at {}",
                    table.indexer().poly_at(idx)
                )));
            }
        }
        let coeffs = {
            let primes = table.primes();
            table.multiplicative(
                1i64,
                |p, e| {
                    let pos = primes.binary_search(&(p as u32)).unwrap();
                    let norm = q.pow(table.indexer().degree_of(p) as u32);
                    prime_power_coeff(trace[pos], bad[pos], norm, e)
                },
                |x, y| x * y,
            )
        };
        Ok(Self {
            curve,
            table,
            trace,
            bad,
            coeffs,
        })
    }

    pub fn curve(&self) -> &EllipticCurve {
        &self.curve
    }

    pub fn table(&self) -> &FactorTable {
        &self.table
    }

    pub fn max_degree(&self) -> usize {
        self.table.max_degree()
    }

    /// `a(f)` for every table entry, indexed like the table.
    pub fn unnormalized(&self) -> &[i64] {
        &self.coeffs
    }

    /// `a_Q` for the prime at position `pos` of [`FactorTable::primes`].
    pub fn trace_at_position(&self, pos: usize) -> (i64, bool) {
        (self.trace[pos], self.bad[pos])
    }

    /// `a_Q` for any prime; primes beyond the table get their own field.
    pub fn trace(&self, qp: &PrimePoly) -> Result<i64> {
        self.curve.field().check_same(qp.field().q())?;
        if qp.degree() <= self.max_degree() {
            let idx = self.table.indexer().index_of(qp.poly()).unwrap();
            let pos = self.table.primes().binary_search(&(idx as u32)).unwrap();
            return Ok(self.trace[pos]);
        }
        let k = ExtField::new(qp.poly())?;
        let t = k.log_of_index(index_of(&Poly::x(qp.field()).rem(qp.poly())?));
        Ok(k.curve_trace(k.eval(self.curve.a(), t), k.eval(self.curve.b(), t)))
    }

    /// `λ(Q) = a_Q / √|Q|`.
    pub fn lambda_q(&self, qp: &PrimePoly) -> Result<QuadValue> {
        let q = self.curve.field().q();
        Ok(QuadValue::normalized(
            q,
            self.trace(qp)?,
            qp.degree() as u32,
        ))
    }

    /// `a(f)` for a monic `f`.
    pub fn coefficient(&self, f: &Poly) -> Result<i64> {
        if f.is_zero() || !f.is_monic() {
            return Err(Error::NotMonic("coefficient argument"));
        }
        if let Some(idx) = self.table.indexer().index_of(f) {
            return Ok(self.coeffs[idx]);
        }
        let q = self.curve.field().q() as i64;
        let mut out = 1i64;
        for (p, e) in f.factor()? {
            let d = p.deg().unwrap() as u32;
            let pp = PrimePoly::new(p)?;
            let bad = self.curve.is_bad(pp.poly());
            out *= prime_power_coeff(self.trace(&pp)?, bad, q.pow(d), e);
        }
        Ok(out)
    }

    /// `λ(f) = a(f) / √|f|`.
    pub fn lambda_f(&self, f: &Poly) -> Result<QuadValue> {
        let q = self.curve.field().q();
        Ok(QuadValue::normalized(
            q,
            self.coefficient(f)?,
            f.deg().unwrap() as u32,
        ))
    }

    /// `Σ_{deg f = n} a(f)` for `n <= max_degree`.
    pub fn degree_sums(&self) -> Vec<i128> {
        (0..=self.max_degree())
            .map(|n| {
                self.table
                    .degree_range(n)
                    .map(|i| self.coeffs[i] as i128)
                    .sum()
            })
            .collect()
    }

    /// The L-polynomial of the untwisted curve, with its truncation and
    /// sign checks.
    pub fn l_polynomial(&self) -> Result<EcLPolynomial> {
        let n = self.curve.conductor_degree() as usize;
        if self.max_degree() < n + 2 {
            return Err(Error::InvalidArgument(format!(
                "tables up to degree {} cannot check an L-polynomial of degree {n}",
                self.max_degree()
            )));
        }
        let sums = self.degree_sums();
        for (k, &s) in sums.iter().enumerate().take(n + 3).skip(n + 1) {
            if s != 0 {
                return Err(Error::InvalidArgument(format!(
                    "coefficient of degree {k} is {s}, above the conductor bound {n}; \
                     the model is probably not minimal"
                )));
            }
        }
        let coeffs = sums[..=n].to_vec();
        let q = self.curve.field().q() as i128;
        let top = coeffs[n];
        let qn = q.pow(n as u32);
        let eps = if top == qn {
            1
        } else if top == -qn {
            -1
        } else {
            return Err(Error::Invariant(format!(
                "leading coefficient {top} is not ±q^{n}"
            )));
        };
        let l = EcLPolynomial {
            q: q as u32,
            coeffs,
            eps,
        };
        if !l.verify_functional_equation() {
            return Err(Error::Invariant(
                "functional equation of the curve's L-polynomial fails".into(),
            ));
        }
        Ok(l)
    }
}

fn index_of(p: &Poly) -> u32 {
    p.coeffs()
        .iter()
        .rev()
        .fold(0u32, |acc, &c| acc * p.q() + c)
}

/// `a(Q^e)`: the good-prime recursion `a_{j+1} = a_Q a_j - |Q| a_{j-1}`, or
/// `a_Q^e` at bad primes.
fn prime_power_coeff(tr: i64, bad: bool, norm: i64, e: u32) -> i64 {
    if bad {
        return tr.pow(e);
    }
    let (mut prev, mut cur) = (1i64, tr);
    if e == 0 {
        return 1;
    }
    for _ in 1..e {
        let next = tr * cur - norm * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `𝓛(E, u) = Σ b_n u^n` with integer `B_n = q^{n/2} b_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcLPolynomial {
    q: u32,
    coeffs: Vec<i128>,
    eps: i8,
}

impl EcLPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn unnormalized(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn normalized(&self) -> Vec<QuadValue> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| QuadValue::normalized(self.q, c, n as u32))
            .collect()
    }

    /// `ε(E)`.
    pub fn sign(&self) -> i8 {
        self.eps
    }

    /// `B_{𝔫-k} = ε q^{𝔫-2k} B_k` for every `k`.
    pub fn verify_functional_equation(&self) -> bool {
        let n = self.degree();
        let q = self.q as i128;
        (0..=n / 2).all(|k| {
            self.coeffs[n - k] == self.eps as i128 * q.pow((n - 2 * k) as u32) * self.coeffs[k]
        })
    }
}
