//! Ordered simplicial complexes, symbolic chains and the subdivision and
//! prism operators.

mod chain;
mod complex;
pub mod io;
mod operators;

pub use chain::{Chain, ComposedMap, MapRef, Simplex, SimplexMap};
pub use complex::{FaceKey, OrderedComplex};
pub use operators::{
    complex_of_chains, cone, iterated_mesh2, level_map, prism_p, prism_t, subdivide, subdivide_n,
    subdivision_facets, Constructed, Operators, SimplicialChainMap,
};
