//! Compatible coverings, the deformation map built from them, the mapping
//! cylinder pipeline that produces `π` and `h` on a simplex, and the formal
//! homotopy calculus assembling them into `ρ` and `H`.
//!
//! Sign convention throughout: a homotopy `h` from `f` to `g` satisfies
//! `∂h + h∂ = f − g`, with `f` the map on the bottom-inclusion side. The
//! homotopies produced here all run from the identity to `π` (or `ρ`).

pub mod calculus;
pub mod covering;
pub mod cylinder;
pub mod deform;
pub mod filler;
pub mod simplex_homotopy;

pub use calculus::{
    chain_homotopy_equiv_report, Calculus, ChainCheck, EquivReport, World, WorldChecks,
};
pub use covering::{
    face_id, find_subdivision_covering, seeded_covering, validate_covering, Cell,
    CompatibleCovering, CoveringCondition, CoveringVerdict, CoveringViolation, FaceId,
    SubdivisionCovering,
};
pub use cylinder::{
    accepted_faces, corner, cylinder_covering, mapping_cylinder, Caps, Cylinder, CylinderCovering,
};
pub use deform::DeformationMap;
pub use filler::{constant_filler, FillRequest, Filled, FillerAudit, FillerOracle, Strategy};
pub use simplex_homotopy::{
    boundary_filler, simplex_face, simplex_homotopy, subdivision_pi, SimplexHomotopy,
    SimplexHomotopyChecks,
};
