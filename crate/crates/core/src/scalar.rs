//! Scalar abstractions.
//!
//! Integer linear algebra is generic over [`Ring`] (any signed Euclidean
//! integer type: `i64`, `i128`, `BigInt`), geometry over [`Scalar`] (any
//! ordered field-like number: `Ratio<i64>`, `BigRational`, `f64`).

use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_traits::{FromPrimitive, Num, Signed};

/// Signed Euclidean integers.
pub trait Ring: Integer + Signed + Clone + Debug + Display + FromPrimitive {}

impl<T> Ring for T where T: Integer + Signed + Clone + Debug + Display + FromPrimitive {}

/// Ordered scalars closed under division.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + FromPrimitive {}

impl<T> Scalar for T where T: Num + Signed + Clone + PartialOrd + Debug + FromPrimitive {}
