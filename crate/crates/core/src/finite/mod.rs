//! Finite T0 spaces, their specialization posets and order complexes.

pub mod io;
mod space;

pub use space::{Certificate, FiniteSpace, Mask, DEFAULT_POINT_CAP};
