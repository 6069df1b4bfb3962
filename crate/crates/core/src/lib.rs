//! Exact arithmetic for quadratic Dirichlet L-functions and quadratic twists of
//! elliptic curves over `F_q[x]`, with prime conductors.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`], [`poly`] and [`enumerate`]: prime fields, polynomials, monic
//!   enumeration, irreducibility and a factorisation sieve.
//! * [`symbol`]: the quadratic residue symbol (Euler criterion and reciprocity).
//! * [`quad`]: the exact value ring `(a + b√q)/q^e`.
//! * [`dirichlet`]: L-polynomials of `χ_P`, functional equation, central values,
//!   the squared approximate functional equation and root locations.
//! * [`elliptic`]: reduction data, Frobenius traces, twisted L-polynomials, root
//!   numbers, central derivatives and analytic ranks.
//! * [`analytics`]: moment sweeps and the exact identities around them.

pub mod analytics;
pub mod dirichlet;
pub mod elliptic;
pub mod enumerate;
pub mod error;
pub mod field;
pub mod poly;
pub mod quad;
pub mod roots;
pub mod symbol;

pub use error::{Error, Result};
pub use field::FieldSpec;
pub use poly::{Degree, Poly};
pub use quad::{QuadFraction, QuadValue};
pub use symbol::{Orientation, PrimePoly, SymbolValue};
