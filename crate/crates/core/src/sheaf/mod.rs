//! Presheaves and sheaves of abelian groups on finite spaces.

pub mod cohomology;
mod five_point;
mod image_cochain;
mod presheaf;
mod sheafify;

pub use cohomology::{
    cech_cohomology, compare_cohomology, godement_cohomology, godement_envelope,
    minimal_open_cover, nerve_cohomology, order_complex_cohomology, ComparisonRow,
};
pub use five_point::{five_point_reproduce, FivePointReport, TranscriptLine};
pub use image_cochain::ImageCochains;
pub use presheaf::{CoverViolation, Group, Presheaf, DEFAULT_COVER_CAP};
pub use sheafify::{sheafify, Sheafification};
