//! Exact-arithmetic computational topology.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: integer matrices, Smith normal form, chain complexes and
//!   (co)homology of finitely presented abelian groups.
//! * [`geometry`]: points with exact scalar coordinates, barycentric solves,
//!   convex-hull membership and mesh bounds.
//! * [`simplicial`]: ordered simplicial complexes, symbolic singular
//!   simplices, formal chains and the subdivision / prism operators.
//! * [`finite`]: finite T0 spaces and their specialization posets.
//! * [`sheaf`]: presheaves of abelian groups on finite spaces,
//!   sheafification, flasqueness, and three routes to sheaf cohomology.
//! * [`nesting`]: nesting oracles, their axioms and the `C^η` membership test.
//! * [`homotopy`]: compatible coverings, the deformation map, the mapping
//!   cylinder pipeline and the formal homotopy calculus.
//!
//! Generic code is written against the scalar traits in [`scalar`]; the
//! aliases below fix the concrete exact types used by the higher layers.

pub mod algebra;
pub mod error;
pub mod finite;
pub mod geometry;
pub mod homotopy;
pub mod nesting;
pub mod scalar;
pub mod sheaf;
pub mod simplicial;

pub use error::{Error, Result};

/// Arbitrary precision integer.
pub type Int = num_bigint::BigInt;
/// Arbitrary precision rational.
pub type Q = num_rational::BigRational;
/// Integer matrix over [`Int`].
pub type IntMatrix = algebra::Matrix<Int>;
/// Point with exact rational coordinates.
pub type QPoint = geometry::Point<Q>;

/// Parses `"3"`, `"-1/4"` style rationals.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Int = n.trim().parse().ok()?;
            let d: Int = d.trim().parse().ok()?;
            if d == Int::from(0) {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => s.parse::<Int>().ok().map(Q::from_integer),
    }
}

/// Rational from a small fraction.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(Int::from(n), Int::from(d))
}
