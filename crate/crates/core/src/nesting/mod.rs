//! Nestings: assignments of open sets to finite point sequences, the four
//! ways of building them, their axioms, and the `C^η` / `C^𝒰` membership
//! predicates on symbolic simplices.

pub mod axioms;
mod membership;
mod oracle;
mod region;

pub use axioms::{
    check_finite, check_pl, check_sequences, Axiom, AxiomReport, AxiomWitness, PlSampler,
};
pub use membership::*;
pub use oracle::{FiniteKind, FiniteNesting, Nesting, PlNesting};
pub use region::{ball_in_ball, balls_disjoint, Region, Tri};
