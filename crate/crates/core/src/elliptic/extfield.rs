//! Log/antilog tables for `F_{q^d} = F_q[t]/(R)`, used for point counting.
//!
//! Nonzero elements are handled as discrete logarithms to a primitive base
//! `γ`; addition goes through the Zech table `Z(k) = log(1 + γ^k)`.

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::{raw, Poly};

/// Logarithm of zero.
pub const ZERO: u32 = u32::MAX;

/// Largest field the tables are built for.
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

#[derive(Debug, Clone)]
pub struct ExtField {
    field: FieldSpec,
    modulus: Vec<u32>,
    degree: usize,
    order: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

fn to_index(v: &[u32], q: u32) -> u32 {
    v.iter().rev().fold(0u32, |acc, &c| acc * q + c)
}

impl ExtField {
    /// Tables for `F_q[t]/(modulus)`; `modulus` must be monic irreducible.
    pub fn new(modulus: &Poly) -> Result<Self> {
        let field = modulus.field();
        let d = modulus
            .deg()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidArgument("modulus must have degree >= 1".into()))?;
        let q = field.q();
        let size = (q as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
        if size > MAX_FIELD_SIZE {
            return Err(Error::Infeasible {
                what: format!("log tables for F_{q}^{d}"),
                estimate: format!("{size} elements"),
            });
        }
        let size = size as usize;
        let order = (size - 1) as u32;
        let m = modulus.coeffs();
        // Candidate bases: t + c first (cheap to multiply by), then the rest.
        let mut candidates: Vec<Vec<u32>> = (0..q)
            .map(|c| {
                let mut v = vec![c, 1];
                raw::rem_monic(&mut v, m, &field);
                v
            })
            .collect();
        candidates.extend((q as usize..size).map(|i| {
            let mut v = Vec::with_capacity(d);
            let mut i = i as u32;
            for _ in 0..d {
                v.push(i % q);
                i /= q;
            }
            raw::trim(&mut v);
            v
        }));
        for gamma in candidates {
            if gamma.is_empty() {
                continue;
            }
            if let Some(exp) = walk(&gamma, m, &field, size) {
                let mut log = vec![ZERO; size];
                for (k, &e) in exp.iter().enumerate() {
                    log[e as usize] = k as u32;
                }
                let mut zech = vec![ZERO; order as usize];
                for k in 0..order as usize {
                    let e = exp[k];
                    let c0 = e % q;
                    let plus_one = e - c0 + (c0 + 1) % q;
                    zech[k] = log[plus_one as usize];
                }
                return Ok(Self {
                    field,
                    modulus: m.to_vec(),
                    degree: d,
                    order,
                    exp,
                    log,
                    zech,
                });
            }
        }
        Err(Error::Invariant(format!(
            "no primitive element modulo {modulus}; is it irreducible?"
        )))
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `q^d - 1`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn size(&self) -> usize {
        self.order as usize + 1
    }

    pub fn modulus(&self) -> Poly {
        Poly::from_residues(self.field, self.modulus.clone())
    }

    /// Log of the element with coefficient index `idx`.
    #[inline]
    pub fn log_of_index(&self, idx: u32) -> u32 {
        self.log[idx as usize]
    }

    #[inline]
    pub fn index_of_log(&self, l: u32) -> u32 {
        if l == ZERO {
            0
        } else {
            self.exp[l as usize]
        }
    }

    /// Log of the constant `c ∈ F_q`.
    #[inline]
    pub fn log_const(&self, c: u32) -> u32 {
        self.log[(c % self.field.q()) as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == ZERO || b == ZERO {
            return ZERO;
        }
        let s = a as u64 + b as u64;
        (s % self.order as u64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        let diff = if b >= a { b - a } else { b + self.order - a };
        let z = self.zech[diff as usize];
        if z == ZERO {
            return ZERO;
        }
        let s = a + z;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == ZERO {
            return ZERO;
        }
        let s = a + self.order / 2;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    /// Quadratic character of the field.
    #[inline]
    pub fn eta(&self, a: u32) -> i32 {
        if a == ZERO {
            0
        } else if a % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Evaluates a polynomial over `F_q` at the element with log `x`.
    pub fn eval(&self, p: &Poly, x: u32) -> u32 {
        p.coeffs().iter().rev().fold(ZERO, |acc, &c| {
            self.add(self.mul(acc, x), self.log_const(c))
        })
    }

    /// Frobenius trace of `y² = x³ + ax + b` (arguments as logs):
    /// `-Σ_x η(x³ + ax + b)`, which is `|F| + 1 - #E(F)` with a singular point
    /// counted once.
    pub fn curve_trace(&self, a: u32, b: u32) -> i64 {
        let n = self.order;
        let mut s: i64 = self.eta(b) as i64;
        let mut cube = 0u32;
        let mut ax = a;
        for _ in 0..n {
            let mut v = if a == ZERO { cube } else { self.add(cube, ax) };
            v = self.add(v, b);
            s += self.eta(v) as i64;
            cube += 3;
            while cube >= n {
                cube -= n;
            }
            if a != ZERO {
                ax += 1;
                if ax == n {
                    ax = 0;
                }
            }
        }
        -s
    }

    /// Size of the Frobenius orbit of the element with log `k`, and whether
    /// `k` is the smallest log in that orbit.
    pub fn orbit(&self, k: u32) -> (usize, bool) {
        let q = self.field.q() as u64;
        let n = self.order as u64;
        let mut cur = (k as u64 * q) % n;
        let mut size = 1;
        let mut least = true;
        while cur != k as u64 {
            if cur < k as u64 {
                least = false;
            }
            cur = (cur * q) % n;
            size += 1;
        }
        (size, least)
    }

    /// Minimal polynomial over `F_q` of the element with log `k`, as
    /// residues lowest degree first.
    pub fn minimal_polynomial(&self, k: u32) -> Vec<u32> {
        let q = self.field.q() as u64;
        let n = self.order as u64;
        let mut roots = vec![k];
        let mut cur = (k as u64 * q) % n;
        while cur != k as u64 {
            roots.push(cur as u32);
            cur = (cur * q) % n;
        }
        // Coefficients as logs; start with the constant polynomial 1.
        let mut c: Vec<u32> = vec![0];
        for r in roots {
            let nr = self.neg(r);
            let mut next = vec![ZERO; c.len() + 1];
            for (j, &cj) in c.iter().enumerate() {
                next[j + 1] = self.add(next[j + 1], cj);
                next[j] = self.add(next[j], self.mul(cj, nr));
            }
            c = next;
        }
        c.iter()
            .map(|&l| {
                let idx = self.index_of_log(l);
                debug_assert!(idx < self.field.q());
                idx
            })
            .collect()
    }
}

/// Powers of `gamma` modulo `m`, as coefficient indices, if `gamma` has full
/// multiplicative order.
fn walk(gamma: &[u32], m: &[u32], field: &FieldSpec, size: usize) -> Option<Vec<u32>> {
    let q = field.q();
    let order = size - 1;
    let mut exp = Vec::with_capacity(order);
    let mut cur: Vec<u32> = vec![1];
    raw::rem_monic(&mut cur, m, field);
    for k in 0..order {
        let idx = to_index(&cur, q);
        if k > 0 && idx == 1 {
            return None;
        }
        exp.push(idx);
        cur = raw::mul_mod(&cur, gamma, m, field);
    }
    (to_index(&cur, q) == 1).then_some(exp)
}
