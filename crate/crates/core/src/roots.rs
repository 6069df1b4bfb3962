//! Complex roots of integer polynomials: exact squarefree splitting over `Q`
//! followed by Aberth iteration on each squarefree part.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

type QPoly = Vec<BigRational>;

fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn derivative(p: &QPoly) -> QPoly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect()
}

fn divrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lb = b[db].clone();
    let mut s = vec![BigRational::zero(); r.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = &r[top] / &lb;
        let shift = top - db;
        for j in 0..=db {
            r[shift + j] = &r[shift + j] - &c * &b[j];
        }
        s[shift] = c;
        r.pop();
        trim(&mut r);
    }
    (s, r)
}

fn monic(p: &QPoly) -> QPoly {
    let l = p.last().unwrap().clone();
    p.iter().map(|c| c / &l).collect()
}

fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    monic(&a)
}

/// Yun's squarefree decomposition: `p = c · Π a_i^i`. Returns the non-constant
/// `a_i` (monic) with their multiplicities.
pub fn squarefree_decomposition(coeffs: &[BigInt]) -> Vec<(Vec<BigRational>, usize)> {
    let mut p: QPoly = coeffs
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    trim(&mut p);
    if p.len() <= 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let dp = derivative(&p);
    let a0 = gcd(&p, &dp);
    let mut b = divrem(&p, &a0).0;
    let mut c = divrem(&dp, &a0).0;
    let mut d = {
        let db = derivative(&b);
        sub(&c, &db)
    };
    let mut i = 1;
    loop {
        let a = gcd(&b, &d);
        if a.len() > 1 {
            out.push((a.clone(), i));
        }
        b = divrem(&b, &a).0;
        if b.len() <= 1 {
            break;
        }
        c = divrem(&d, &a).0;
        d = sub(&c, &derivative(&b));
        i += 1;
    }
    out
}

fn sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    let mut r: QPoly = (0..n)
        .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
        .collect();
    trim(&mut r);
    r
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Roots of a squarefree polynomial with float coefficients (lowest first).
pub fn aberth(c: &[f64]) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let radius = c
        .iter()
        .take(n)
        .map(|a| (a / lead).abs())
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let r0 = (c[0] / lead)
        .abs()
        .powf(1.0 / n as f64)
        .clamp(1e-6, 1.0 + radius);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(r0, t)
        })
        .collect();
    let mut converged = false;
    for _ in 0..2000 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex64::one() / (z[i] - z[j]))
                .sum();
            let w = ratio / (Complex64::one() - ratio * s);
            z[i] -= w;
            worst = worst.max(w.norm() / z[i].norm().max(1e-300));
        }
        if worst < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "Aberth iteration on a degree-{n} polynomial"
        )));
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            *zi -= p / dp;
        }
    }
    Ok(z)
}

/// All complex roots, with multiplicity, of an integer polynomial given
/// lowest degree first.
pub fn integer_poly_roots(coeffs: &[BigInt]) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (factor, mult) in squarefree_decomposition(coeffs) {
        let f: Vec<f64> = factor
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect();
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonConvergence("coefficient overflow".into()));
        }
        for r in aberth(&f)? {
            for _ in 0..mult {
                out.push(r);
            }
        }
    }
    Ok(out)
}

/// Integer content-free form of a rational polynomial; used by tests.
pub fn primitive_part(p: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let l = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return ints;
    }
    let s = if ints.last().is_some_and(|c| c.is_negative()) {
        -g
    } else {
        g
    };
    ints.into_iter().map(|c| c / &s).collect()
}
