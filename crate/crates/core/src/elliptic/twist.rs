//! Quadratic twists `E ⊗ χ_P` by odd-degree primes: L-polynomials completed
//! through the twisted functional equation, root numbers, central
//! derivatives and analytic ranks.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{CurveTables, EcLPolynomial, EllipticCurve};
use crate::enumerate::enumerate_irreducible;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quad::{quad_sum, QuadValue};
use crate::symbol::{character_table, Orientation, PrimePoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistOptions {
    pub orientation: Orientation,
    /// Largest `q^d` for which degree-`d` sums are computed directly.
    pub max_entries: u64,
    /// Budget for the one-step horizon extension used when the root number
    /// cannot be read off the direct window.
    pub max_extended_entries: u64,
}

impl Default for TwistOptions {
    fn default() -> Self {
        Self {
            orientation: Orientation::Literal,
            max_entries: 20_000,
            max_extended_entries: 200_000,
        }
    }
}

fn largest_degree(q: u32, budget: u64) -> usize {
    let mut d = 0usize;
    let mut size = 1u64;
    while size.saturating_mul(q as u64) <= budget {
        size *= q as u64;
        d += 1;
    }
    d
}

/// Shared per-curve data for building twists.
#[derive(Debug)]
pub struct TwistContext {
    tables: CurveTables,
    extended: OnceLock<Result<CurveTables>>,
    l_curve: EcLPolynomial,
    options: TwistOptions,
    horizon: usize,
}

impl TwistContext {
    pub fn new(curve: EllipticCurve, options: TwistOptions) -> Result<Self> {
        let q = curve.field().q();
        let n = curve.conductor_degree() as usize;
        let horizon = largest_degree(q, options.max_entries);
        if horizon < n + 2 {
            return Err(Error::Infeasible {
                what: format!("curve tables up to degree {} over F_{q}", n + 2),
                estimate: format!("{} table entries", (q as u128).pow(n as u32 + 2)),
            });
        }
        let tables = CurveTables::new(curve, horizon)?;
        let l_curve = tables.l_polynomial()?;
        Ok(Self {
            tables,
            extended: OnceLock::new(),
            l_curve,
            options,
            horizon,
        })
    }

    pub fn with_defaults(curve: EllipticCurve) -> Result<Self> {
        Self::new(curve, TwistOptions::default())
    }

    pub fn curve(&self) -> &EllipticCurve {
        self.tables.curve()
    }

    pub fn tables(&self) -> &CurveTables {
        &self.tables
    }

    pub fn options(&self) -> TwistOptions {
        self.options
    }

    /// `𝓛(E, u)` of the untwisted curve.
    pub fn curve_l_polynomial(&self) -> &EcLPolynomial {
        &self.l_curve
    }

    /// `ε(E)`.
    pub fn curve_sign(&self) -> i8 {
        self.l_curve.sign()
    }

    /// Highest degree summed directly without extension.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Degree of the twisted L-polynomial for a prime of odd degree `d`.
    pub fn twisted_degree(&self, d: usize) -> usize {
        let c = self.curve();
        let (dm, da) = c.profile();
        // A twist ramified at infinity has additive reduction there.
        dm + 2 * da + 2 * d - 2
    }

    /// Primes of degree `d` coprime to `Δ`, in index order, and the ones
    /// dividing `Δ`.
    pub fn conductors(&self, d: usize) -> Result<(Vec<PrimePoly>, Vec<Poly>)> {
        let field = self.curve().field();
        let all: Vec<PrimePoly> = if d <= self.tables.max_degree() {
            let t = self.tables.table();
            t.primes_of_degree(d)
                .iter()
                .map(|&i| PrimePoly::new_unchecked(t.indexer().poly_at(i as usize)))
                .collect()
        } else {
            enumerate_irreducible(field, d)?
                .map(PrimePoly::new_unchecked)
                .collect()
        };
        let mut keep = Vec::new();
        let mut skipped = Vec::new();
        for p in all {
            if self.curve().delta().rem(p.poly())?.is_zero() {
                skipped.push(p.into_poly());
            } else {
                keep.push(p);
            }
        }
        Ok((keep, skipped))
    }

    fn extended_tables(&self) -> Result<&CurveTables> {
        self.extended
            .get_or_init(|| {
                let q = self.curve().field().q();
                let d = largest_degree(q, self.options.max_extended_entries);
                if d <= self.horizon {
                    return Err(Error::Infeasible {
                        what: "extending the twist horizon".into(),
                        estimate: format!(
                            "{} table entries",
                            (q as u128).pow(self.horizon as u32 + 1)
                        ),
                    });
                }
                CurveTables::new(self.curve().clone(), self.horizon + 1)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn direct_sums(&self, tables: &CurveTables, p: &PrimePoly, upto: usize) -> Result<Vec<i128>> {
        let table = tables.table();
        let chi = character_table(table, p, self.options.orientation, upto)?;
        let a = tables.unnormalized();
        Ok((0..=upto)
            .map(|n| {
                table
                    .degree_range(n)
                    .map(|i| a[i] as i128 * chi[i] as i128)
                    .sum()
            })
            .collect())
    }

    /// The twist `E ⊗ χ_P`: coefficients `B_n = Σ_{deg f = n} a(f) χ_P(f)`
    /// summed directly up to the horizon and completed by the functional
    /// equation, which is verified on every pair both of whose members are
    /// summed directly.
    pub fn twist(&self, p: &PrimePoly) -> Result<TwistRecord> {
        self.build(p, None)?.ok_or_else(|| Error::Infeasible {
            what: format!("root number of the twist by {} is not determined", p.poly()),
            estimate: format!("sums beyond degree {}", self.horizon + 1),
        })
    }

    /// As [`Self::twist`], but when the direct sums leave the sign open it is
    /// taken from `ε = ε_d ε(E) χ_P(M)` with the given `ε_d`.
    pub fn twist_with_degree_factor(&self, p: &PrimePoly, eps_deg: i8) -> Result<TwistRecord> {
        Ok(self
            .build(p, Some(eps_deg))?
            .expect("a sign is always available"))
    }

    fn build(&self, p: &PrimePoly, eps_deg: Option<i8>) -> Result<Option<TwistRecord>> {
        let curve = self.curve();
        curve.field().check_same(p.field().q())?;
        let d = p.degree();
        if d % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "twists are by primes of odd degree, got degree {d}"
            )));
        }
        if curve.infinity_is_star() {
            return Err(Error::Unsupported(
                "the fibre at infinity is of type I_n*, which an odd-degree twist makes semistable"
                    .into(),
            ));
        }
        if curve.delta().rem(p.poly())?.is_zero() {
            return Err(Error::InvalidArgument(format!(
                "{} divides the discriminant",
                p.poly()
            )));
        }
        let m = self.twisted_degree(d);
        let q = curve.field().q();
        let mut horizon = self.horizon.min(m + 2);
        if horizon < m.div_ceil(2) {
            return Err(Error::Infeasible {
                what: format!(
                    "twist of degree {m} needs sums up to degree {}",
                    m.div_ceil(2)
                ),
                estimate: format!(
                    "{} terms per conductor",
                    (q as u128).pow(m.div_ceil(2) as u32)
                ),
            });
        }
        let mut sums = self.direct_sums(&self.tables, p, horizon)?;
        let mut window = check_window(q, m, &sums, p)?;
        if window.eps.is_none() && horizon < m {
            let ext = self.extended_tables()?;
            horizon += 1;
            sums = self.direct_sums(ext, p, horizon)?;
            window = check_window(q, m, &sums, p)?;
        }
        let chi_m = p.chi(curve.m(), self.options.orientation)?.value();
        if chi_m == 0 {
            return Err(Error::Invariant(
                "χ_P(M) vanishes for P coprime to Δ".into(),
            ));
        }
        let from_window = window.eps.is_some();
        let eps = match (window.eps, eps_deg) {
            (Some(e), _) => e,
            (None, Some(ed)) => ed * self.curve_sign() * chi_m,
            (None, None) => return Ok(None),
        };
        for (n, s) in sums.iter().enumerate().skip(m + 1) {
            if *s != 0 {
                return Err(Error::Invariant(format!(
                    "twist by {} has a nonzero coefficient in degree {n} > {m}",
                    p.poly()
                )));
            }
        }
        let qi = q as i128;
        let coeffs: Vec<i128> = (0..=m)
            .map(|n| {
                if n <= horizon {
                    sums[n]
                } else {
                    eps as i128 * qi.pow((2 * n - m) as u32) * sums[m - n]
                }
            })
            .collect();
        let eps_deg = eps * self.curve_sign() * chi_m;
        let mut rec = TwistRecord {
            p: p.poly().clone(),
            m,
            coeffs,
            eps,
            eps_deg,
            chi_m,
            rank: 0,
            horizon: horizon.min(m),
            verified_pairs: window.pairs,
            sign_from_window: from_window,
        };
        if !rec.verify_functional_equation() {
            return Err(Error::Invariant(format!(
                "twisted functional equation fails for {}",
                p.poly()
            )));
        }
        rec.rank = rec.compute_rank()?;
        if (rec.rank % 2 == 1) != (eps == -1) {
            return Err(Error::Invariant(format!(
                "rank {} has the wrong parity for ε = {eps} at {}",
                rec.rank,
                p.poly()
            )));
        }
        Ok(Some(rec))
    }

    /// Re-checks a stored record: the conductor and degree must match this
    /// curve, the functional equation must hold with the stored sign, and the
    /// recomputed rank must equal the stored one. `chi_m` and `eps_deg` are
    /// recomputed.
    pub fn revalidate(&self, mut rec: TwistRecord) -> Result<TwistRecord> {
        let p = PrimePoly::new(rec.p.clone())?;
        let curve = self.curve();
        curve.field().check_same(p.field().q())?;
        if p.degree() % 2 == 0 || curve.delta().rem(p.poly())?.is_zero() {
            return Err(Error::InvalidArgument(format!(
                "{} is not an admissible twisting prime",
                rec.p
            )));
        }
        if rec.m != self.twisted_degree(p.degree()) || rec.eps.abs() != 1 {
            return Err(Error::Invariant(format!(
                "stored twist by {} has degree {} and sign {}",
                rec.p, rec.m, rec.eps
            )));
        }
        if !rec.verify_functional_equation() {
            return Err(Error::Invariant(format!(
                "stored twist by {} fails the functional equation",
                rec.p
            )));
        }
        let rank = rec.compute_rank()?;
        if rank != rec.rank {
            return Err(Error::Invariant(format!(
                "stored twist by {} has rank {} but its coefficients give {rank}",
                rec.p, rec.rank
            )));
        }
        rec.chi_m = p.chi(curve.m(), self.options.orientation)?.value();
        rec.eps_deg = rec.eps * self.curve_sign() * rec.chi_m;
        Ok(rec)
    }

    /// Every twist by a prime of degree `d` coprime to `Δ`. The degree
    /// factor `ε_d` is asserted constant over the twists whose sign the
    /// direct sums determine; the remaining twists are completed with it.
    pub fn sweep(&self, d: usize) -> Result<TwistSweep> {
        self.sweep_resuming(d, &HashMap::new())
    }

    /// As [`Self::sweep`], taking the twists present in `known` from there
    /// after [`Self::revalidate`].
    pub fn sweep_resuming(
        &self,
        d: usize,
        known: &HashMap<Poly, TwistRecord>,
    ) -> Result<TwistSweep> {
        let (primes, skipped) = self.conductors(d)?;
        let first: Vec<Option<TwistRecord>> = primes
            .par_iter()
            .map(|p| match known.get(p.poly()) {
                Some(r) => self.revalidate(r.clone()).map(Some),
                None => self.build(p, None),
            })
            .collect::<Result<_>>()?;
        let eps_deg = match first.iter().flatten().find(|r| r.sign_from_window) {
            Some(r) => r.eps_deg,
            None => {
                return Err(Error::Infeasible {
                    what: format!("no twist of degree {d} has a sign fixed by its direct sums"),
                    estimate: format!("sums beyond degree {}", self.horizon + 1),
                })
            }
        };
        let records: Vec<TwistRecord> = first
            .into_par_iter()
            .zip(primes.par_iter())
            .map(|(r, p)| match r {
                Some(r) => Ok(r),
                None => self.twist_with_degree_factor(p, eps_deg),
            })
            .collect::<Result<_>>()?;
        if let Some(bad) = records.iter().find(|r| r.eps_deg != eps_deg) {
            return Err(Error::Invariant(format!(
                "degree factor of the root number is {} at {} but {eps_deg} elsewhere in degree {d}",
                bad.eps_deg, bad.p
            )));
        }
        Ok(TwistSweep {
            degree: d,
            eps_deg,
            records,
            skipped,
        })
    }
}

struct Window {
    eps: Option<i8>,
    pairs: usize,
}

/// Checks `B_{m-k} = ε q^{m-2k} B_k` on every pair inside the directly summed
/// range and returns the sign they force.
fn check_window(q: u32, m: usize, sums: &[i128], p: &PrimePoly) -> Result<Window> {
    let h = sums.len() - 1;
    let lo = m.saturating_sub(h);
    let qi = q as i128;
    let mut eps = None;
    let mut pairs = 0;
    for k in lo..=m / 2 {
        pairs += 1;
        let low = sums[k];
        let high = sums[m - k];
        let scale = qi.pow((m - 2 * k) as u32) * low;
        let forced = if low == 0 {
            if high != 0 {
                return Err(Error::Invariant(format!(
                    "twist by {}: B_{k} = 0 but B_{} = {high}",
                    p.poly(),
                    m - k
                )));
            }
            continue;
        } else if high == scale {
            1
        } else if high == -scale {
            -1
        } else {
            return Err(Error::Invariant(format!(
                "twist by {}: B_{} / (q^{} B_{k}) is not ±1",
                p.poly(),
                m - k,
                m - 2 * k
            )));
        };
        match eps {
            None => eps = Some(forced),
            Some(e) if e != forced => {
                return Err(Error::Invariant(format!(
                    "twist by {}: functional-equation pairs force both signs",
                    p.poly()
                )))
            }
            _ => {}
        }
    }
    Ok(Window { eps, pairs })
}

/// One twisted L-polynomial `𝓛(E ⊗ χ_P, u) = Σ b_n u^n`, stored through the
/// integers `B_n = q^{n/2} b_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistRecord {
    pub p: Poly,
    /// Degree `𝔫 + 2 deg P`.
    pub m: usize,
    pub coeffs: Vec<i128>,
    pub eps: i8,
    pub eps_deg: i8,
    pub chi_m: i8,
    pub rank: usize,
    /// Highest degree summed directly.
    pub horizon: usize,
    /// Number of functional-equation pairs checked on direct sums.
    pub verified_pairs: usize,
    /// Whether the direct sums fixed `ε`; otherwise it came from the
    /// degree factor of its sweep.
    pub sign_from_window: bool,
}

impl TwistRecord {
    pub fn q(&self) -> u32 {
        self.p.q()
    }

    pub fn normalized(&self) -> Vec<QuadValue> {
        let q = self.q();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| QuadValue::normalized(q, c, n as u32))
            .collect()
    }

    /// `ε⁻ = (1 - ε)/2`.
    pub fn eps_minus(&self) -> u8 {
        ((1 - self.eps) / 2) as u8
    }

    pub fn verify_functional_equation(&self) -> bool {
        let q = self.q() as i128;
        let m = self.m;
        self.coeffs.len() == m + 1
            && self.coeffs[0] == 1
            && (0..=m / 2).all(|k| {
                self.coeffs[m - k] == self.eps as i128 * q.pow((m - 2 * k) as u32) * self.coeffs[k]
            })
    }

    /// `𝓛(q^{-1/2})`.
    pub fn central_value(&self) -> QuadValue {
        let q = self.q();
        let u0 = QuadValue::sqrt_q_pow(q, -1);
        let terms: Vec<QuadValue> = self
            .normalized()
            .iter()
            .enumerate()
            .map(|(n, b)| b * &u0.pow(n as u32))
            .collect();
        quad_sum(q, &terms)
    }

    /// Multiplicity of `u = q^{-1/2}`: with `u = q^{-1/2} v` the polynomial
    /// `Σ B_n q^{m-n} v^n` has integer coefficients, and its `k`-th Taylor
    /// coefficient at `v = 1` is `Σ_n C(n,k) B_n q^{m-n}`.
    fn compute_rank(&self) -> Result<usize> {
        let q = BigInt::from(self.q());
        let m = self.m;
        let c: Vec<BigInt> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, &b)| BigInt::from(b) * num_traits::pow(q.clone(), m - n))
            .collect();
        let mut binom = vec![BigInt::from(1); m + 1];
        for k in 0..=m {
            let taylor: BigInt = (k..=m).map(|n| &binom[n] * &c[n]).sum();
            if !taylor.is_zero() {
                return Ok(k);
            }
            // C(n, k+1) = C(n, k) (n - k) / (k + 1)
            for n in (k + 1..=m).rev() {
                binom[n] = &binom[n] * BigInt::from(n - k) / BigInt::from(k + 1);
            }
            binom[k] = BigInt::zero();
        }
        Err(Error::Invariant(format!(
            "the twist by {} vanishes identically at the centre",
            self.p
        )))
    }

    /// Order of vanishing at the central point.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `𝔫`, the degree of the untwisted L-polynomial.
    pub fn curve_degree(&self) -> usize {
        self.m - 2 * self.p.deg().unwrap()
    }

    /// `S = Σ_{deg f ≤ K} (K - deg f) λ(f)χ_P(f)/√|f|` with
    /// `K = [𝔫/2] + deg P`, evaluated whatever the sign.
    pub fn derivative_sum(&self) -> QuadValue {
        let q = self.q();
        let k = self.curve_degree() / 2 + self.p.deg().unwrap();
        let terms: Vec<QuadValue> = (0..=k.min(self.m))
            .map(|n| QuadValue::from_q_fraction(q, self.coeffs[n] * (k - n) as i128, n as u32))
            .collect();
        quad_sum(q, &terms)
    }

    /// `S` next to `-q^{-1/2} 𝓛'(q^{-1/2})` from the formal derivative, which
    /// should be `2S`; `L'(1/2) = 2 (log q) S` when `ε = -1`.
    pub fn central_derivative(&self) -> Result<DerivativeReport> {
        if self.eps != -1 {
            return Err(Error::InvalidArgument(format!(
                "derivative formula needs ε = -1, the twist by {} has ε = +1",
                self.p
            )));
        }
        if self.m % 2 == 1 {
            return Err(Error::Unsupported(
                "the derivative formula needs an even conductor degree".into(),
            ));
        }
        let q = self.q();
        let lemma = self.derivative_sum();
        let u0 = QuadValue::sqrt_q_pow(q, -1);
        let deriv_terms: Vec<QuadValue> = self
            .normalized()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, b)| (b * &u0.pow(n as u32 - 1)).mul_int(&BigInt::from(n)))
            .collect();
        let deriv = quad_sum(q, &deriv_terms);
        let formal = -(&u0 * &deriv);
        Ok(DerivativeReport {
            agrees: formal == lemma.mul_int(&BigInt::from(2)),
            lemma_sum: lemma,
            formal,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivativeReport {
    /// `S` from the finite sum.
    pub lemma_sum: QuadValue,
    /// `-q^{-1/2} 𝓛'(q^{-1/2})`, which should equal `2S`.
    pub formal: QuadValue,
    pub agrees: bool,
}

/// All twists of one degree.
#[derive(Debug, Clone, Serialize)]
pub struct TwistSweep {
    pub degree: usize,
    pub eps_deg: i8,
    pub records: Vec<TwistRecord>,
    /// Primes of this degree dividing `Δ`.
    pub skipped: Vec<Poly>,
}

/// First rank-one twist in index order, with the census of ranks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankSearch {
    pub degree: usize,
    pub eps_deg: i8,
    pub witness: Option<Poly>,
    pub histogram: BTreeMap<usize, usize>,
    pub census: usize,
}

/// Scans the twists by primes of degree `2g + 1`.
pub fn rank_one_search(ctx: &TwistContext, g: usize) -> Result<RankSearch> {
    rank_search_from_sweep(ctx, &ctx.sweep(2 * g + 1)?)
}

/// As [`rank_one_search`] on an already computed sweep.
pub fn rank_search_from_sweep(ctx: &TwistContext, sweep: &TwistSweep) -> Result<RankSearch> {
    if sweep.eps_deg * ctx.curve_sign() == 1 && ctx.curve().m().is_one() {
        return Err(Error::InvalidArgument(
            "ε_d ε(E) = 1 and M = 1: every twist has even rank".into(),
        ));
    }
    let mut histogram = BTreeMap::new();
    for r in &sweep.records {
        *histogram.entry(r.rank).or_insert(0) += 1;
    }
    Ok(RankSearch {
        degree: sweep.degree,
        eps_deg: sweep.eps_deg,
        witness: sweep
            .records
            .iter()
            .find(|r| r.rank == 1)
            .map(|r| r.p.clone()),
        histogram,
        census: sweep.records.len(),
    })
}
