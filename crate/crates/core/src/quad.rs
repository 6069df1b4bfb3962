//! Exact arithmetic in the ring of values `(a + b√q)/q^e`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// `(a + b√q)/q^e` in canonical form: `e = 0` or `q` does not divide both
/// `a` and `b`. Zero is `(0, 0, 0)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadValue {
    q: u32,
    a: BigInt,
    b: BigInt,
    e: u32,
}

fn q_pow(q: u32, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(q), e as usize)
}

impl QuadValue {
    pub fn new(q: u32, a: impl Into<BigInt>, b: impl Into<BigInt>, e: u32) -> Self {
        let mut v = Self {
            q,
            a: a.into(),
            b: b.into(),
            e,
        };
        v.canonicalize();
        v
    }

    fn canonicalize(&mut self) {
        if self.a.is_zero() && self.b.is_zero() {
            self.e = 0;
            return;
        }
        let qb = BigInt::from(self.q);
        while self.e > 0 {
            let (qa, ra) = self.a.div_rem(&qb);
            if !ra.is_zero() {
                break;
            }
            let (qbv, rb) = self.b.div_rem(&qb);
            if !rb.is_zero() {
                break;
            }
            self.a = qa;
            self.b = qbv;
            self.e -= 1;
        }
    }

    pub fn zero(q: u32) -> Self {
        Self::new(q, 0, 0, 0)
    }

    pub fn one(q: u32) -> Self {
        Self::new(q, 1, 0, 0)
    }

    pub fn from_int(q: u32, n: impl Into<BigInt>) -> Self {
        Self::new(q, n, 0, 0)
    }

    /// `n / q^e`.
    pub fn from_q_fraction(q: u32, n: impl Into<BigInt>, e: u32) -> Self {
        Self::new(q, n, 0, e)
    }

    pub fn sqrt_q(q: u32) -> Self {
        Self::new(q, 0, 1, 0)
    }

    /// `q^{k/2}` for any integer `k`.
    pub fn sqrt_q_pow(q: u32, k: i64) -> Self {
        let half = k.div_euclid(2);
        let odd = k.rem_euclid(2) == 1;
        let (a, b) = if odd { (0, 1) } else { (1, 0) };
        if half >= 0 {
            let s = q_pow(q, half as u32);
            Self::new(q, s.clone() * a, s * b, 0)
        } else {
            Self::new(q, a, b, (-half) as u32)
        }
    }

    /// `n · q^{-k/2}`, the normalisation of an integer coefficient of degree `k`.
    pub fn normalized(q: u32, n: impl Into<BigInt>, k: u32) -> Self {
        let n = n.into();
        if k % 2 == 0 {
            Self::new(q, n, 0, k / 2)
        } else {
            Self::new(q, 0, n, k / 2 + 1)
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The value as a rational, if `b = 0`.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.a.clone(), q_pow(self.q, self.e)))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::FieldMismatch {
                left: self.q,
                right: other.q,
            });
        }
        Ok(())
    }

    fn lifted(&self, e: u32) -> (BigInt, BigInt) {
        let s = q_pow(self.q, e - self.e);
        (&self.a * &s, &self.b * &s)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let e = self.e.max(other.e);
        let (a1, b1) = self.lifted(e);
        let (a2, b2) = other.lifted(e);
        Ok(Self::new(self.q, a1 + a2, b1 + b2, e))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let q = BigInt::from(self.q);
        let a = &self.a * &other.a + &self.b * &other.b * q;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::new(self.q, a, b, self.e + other.e))
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        Self::new(self.q, &self.a * n, &self.b * n, self.e)
    }

    /// Multiplication by a rational scalar. The result may leave the ring, so
    /// it is returned as a [`QuadFraction`].
    pub fn scale_rational(&self, r: &BigRational) -> QuadFraction {
        QuadFraction::new(self.mul_int(r.numer()), r.denom().clone())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one(self.q);
        let mut b = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                r = &r * &b;
            }
            n >>= 1;
            if n > 0 {
                b = &b * &b;
            }
        }
        r
    }

    /// `(a - b√q)/q^e`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.q, self.a.clone(), -self.b.clone(), self.e)
    }

    /// Exact sign.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa == 0 || sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        let a2 = &self.a * &self.a;
        let b2q = &self.b * &self.b * BigInt::from(self.q);
        match a2.cmp(&b2q) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let d = q_pow(self.q, self.e);
        let ra = BigRational::new(self.a.clone(), d.clone())
            .to_f64()
            .unwrap_or(f64::NAN);
        let rb = BigRational::new(self.b.clone(), d)
            .to_f64()
            .unwrap_or(f64::NAN);
        ra + rb * (self.q as f64).sqrt()
    }
}

fn sign_of(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Exact sum; order does not matter.
pub fn quad_sum<'a, I>(q: u32, values: I) -> QuadValue
where
    I: IntoIterator<Item = &'a QuadValue>,
{
    values
        .into_iter()
        .fold(QuadValue::zero(q), |acc, v| &acc + v)
}

impl PartialOrd for QuadValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = self.try_sub(other).ok()?;
        Some(d.signum().cmp(&0))
    }
}

impl<'a> Add<&'a QuadValue> for &'a QuadValue {
    type Output = QuadValue;
    fn add(self, rhs: &QuadValue) -> QuadValue {
        self.try_add(rhs).expect("QuadValue: mismatched q")
    }
}

impl<'a> Sub<&'a QuadValue> for &'a QuadValue {
    type Output = QuadValue;
    fn sub(self, rhs: &QuadValue) -> QuadValue {
        self.try_sub(rhs).expect("QuadValue: mismatched q")
    }
}

impl<'a> Mul<&'a QuadValue> for &'a QuadValue {
    type Output = QuadValue;
    fn mul(self, rhs: &QuadValue) -> QuadValue {
        self.try_mul(rhs).expect("QuadValue: mismatched q")
    }
}

impl Add for QuadValue {
    type Output = QuadValue;
    fn add(self, rhs: QuadValue) -> QuadValue {
        &self + &rhs
    }
}

impl Sub for QuadValue {
    type Output = QuadValue;
    fn sub(self, rhs: QuadValue) -> QuadValue {
        &self - &rhs
    }
}

impl Mul for QuadValue {
    type Output = QuadValue;
    fn mul(self, rhs: QuadValue) -> QuadValue {
        &self * &rhs
    }
}

impl Neg for &QuadValue {
    type Output = QuadValue;
    fn neg(self) -> QuadValue {
        QuadValue {
            q: self.q,
            a: -self.a.clone(),
            b: -self.b.clone(),
            e: self.e,
        }
    }
}

impl Neg for QuadValue {
    type Output = QuadValue;
    fn neg(self) -> QuadValue {
        -&self
    }
}

impl fmt::Debug for QuadValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QuadValue[q={}]({}, {}, {})",
            self.q, self.a, self.b, self.e
        )
    }
}

impl fmt::Display for QuadValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}*sqrt({}))/{}^{}",
            self.a, self.b, self.q, self.q, self.e
        )
    }
}

/// Serialised as `[a, b, e]` with `a`, `b` decimal strings.
impl Serialize for QuadValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.a.to_string(), self.b.to_string(), self.e).serialize(s)
    }
}

/// The triple form; the ambient `q` comes from the enclosing record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadTriple(pub String, pub String, pub u32);

impl QuadTriple {
    pub fn from_value(v: &QuadValue) -> Self {
        Self(v.a.to_string(), v.b.to_string(), v.e)
    }

    pub fn into_value(self, q: u32) -> Result<QuadValue> {
        let parse = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|_| Error::InvalidArgument(format!("bad integer '{s}'")))
        };
        let v = QuadValue::new(q, parse(&self.0)?, parse(&self.1)?, self.2);
        if v.a.to_string() != self.0 || v.b.to_string() != self.1 || v.e != self.2 {
            return Err(Error::InvalidArgument(format!(
                "non-canonical value ({}, {}, {})",
                self.0, self.1, self.2
            )));
        }
        Ok(v)
    }
}

/// A [`QuadValue`] divided by a positive integer coprime to `q`. Used for
/// averages over populations whose size is not a power of `q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadFraction {
    num: QuadValue,
    den: BigInt,
}

impl QuadFraction {
    pub fn new(num: QuadValue, den: impl Into<BigInt>) -> Self {
        let mut den: BigInt = den.into();
        assert!(!den.is_zero(), "QuadFraction with zero denominator");
        let q = num.q;
        let mut num = num;
        if den.is_negative() {
            den = -den;
            num = -num;
        }
        let qb = BigInt::from(q);
        let mut e = num.e;
        loop {
            let (d, r) = den.div_rem(&qb);
            if !r.is_zero() {
                break;
            }
            den = d;
            e += 1;
        }
        let g = num.a.gcd(&num.b).gcd(&den);
        let (a, b) = if g.is_one() || g.is_zero() {
            (num.a, num.b)
        } else {
            den /= &g;
            (num.a / &g, num.b / &g)
        };
        let num = QuadValue::new(q, a, b, e);
        if num.is_zero() {
            den = BigInt::one();
        }
        Self { num, den }
    }

    pub fn from_value(v: QuadValue) -> Self {
        Self {
            num: v,
            den: BigInt::one(),
        }
    }

    pub fn numerator(&self) -> &QuadValue {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn q(&self) -> u32 {
        self.num.q
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let n = self
            .num
            .mul_int(&other.den)
            .try_add(&other.num.mul_int(&self.den))?;
        Ok(Self::new(n, &self.den * &other.den))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&Self {
            num: -&other.num,
            den: other.den.clone(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        Ok(Self::new(
            self.num.try_mul(&other.num)?,
            &self.den * &other.den,
        ))
    }

    pub fn div_int(&self, n: impl Into<BigInt>) -> Self {
        Self::new(self.num.clone(), &self.den * n.into())
    }

    pub fn signum(&self) -> i8 {
        self.num.signum()
    }

    pub fn to_f64(&self) -> f64 {
        let d = q_pow(self.num.q, self.num.e) * &self.den;
        let ra = BigRational::new(self.num.a.clone(), d.clone())
            .to_f64()
            .unwrap_or(f64::NAN);
        let rb = BigRational::new(self.num.b.clone(), d)
            .to_f64()
            .unwrap_or(f64::NAN);
        ra + rb * (self.num.q as f64).sqrt()
    }
}

/// Serialised as `{"num": [a, b, e], "den": d}` with decimal strings.
impl Serialize for QuadFraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuadFraction", 2)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den.to_string())?;
        st.end()
    }
}

impl fmt::Debug for QuadFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadFraction({:?} / {})", self.num, self.den)
    }
}

impl fmt::Display for QuadFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}*sqrt({}))/({}^{}*{})",
            self.num.a, self.num.b, self.num.q, self.num.q, self.num.e, self.den
        )
    }
}
