//! Prime fields `F_q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The base field `F_q`, `q` an odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    q: u32,
    requires_char_coprime_6: bool,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn new(q: u32) -> Result<Self> {
        if q < 3 || !is_prime(q) {
            return Err(Error::InvalidField {
                q: q as u64,
                reason: "q must be an odd prime",
            });
        }
        Ok(Self {
            q,
            requires_char_coprime_6: false,
        })
    }

    /// A field on which elliptic-curve operations are allowed: `(q, 6) = 1`.
    pub fn for_elliptic(q: u32) -> Result<Self> {
        let mut f = Self::new(q)?;
        if q < 5 {
            return Err(Error::InvalidField {
                q: q as u64,
                reason: "elliptic-curve operations need (q, 6) = 1",
            });
        }
        f.requires_char_coprime_6 = true;
        Ok(f)
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn requires_char_coprime_6(&self) -> bool {
        self.requires_char_coprime_6
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a % self.q == 0 {
            None
        } else {
            Some(self.pow(a, (self.q - 2) as u64))
        }
    }

    /// Legendre symbol `(a/q)` as -1, 0 or 1.
    pub fn legendre(&self, a: u32) -> i8 {
        let a = a % self.q;
        if a == 0 {
            return 0;
        }
        if self.pow(a, ((self.q - 1) / 2) as u64) == 1 {
            1
        } else {
            -1
        }
    }

    /// `(q - 1)/2` is odd, i.e. `q ≡ 3 (mod 4)`; this is the parity that
    /// enters the reciprocity sign.
    #[inline]
    pub fn reciprocity_twisted(&self) -> bool {
        self.q % 4 == 3
    }

    pub(crate) fn check_same(&self, other: u32) -> Result<()> {
        if self.q != other {
            Err(Error::FieldMismatch {
                left: self.q,
                right: other,
            })
        } else {
            Ok(())
        }
    }
}
