//! Cover nerves with chart algebras on faces, the ordered Čech cosimplicial
//! DG Lie algebra, Čech cohomology on finite layers, polynomial forms on
//! simplices and the Thom–Sullivan normalization.

mod cech;
mod cohomology;
mod forms;
mod nerve;
mod ts;

pub use cech::{refine, CechDgla, CechLevel, Sections};
pub use cohomology::{cech_cohomology, Cochain, CohomologyReport, Layer, LayerComplex};
pub use forms::{coface, coordinate_poly, FormError, SimplexForm};
pub use nerve::{dedup, delete, subfaces, AlgebraSpec, Face, Nerve, NerveRef, NerveSpec, Refinement};
pub use ts::{surjection_to, FormKey, TsDgla, TsElem, TsError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NerveError {
    #[error("bad face: {0}")]
    BadFace(String),
    #[error("bad restriction: {0}")]
    BadRestriction(String),
    #[error("restrictions {sub} -> {mid} -> {face} do not compose to {sub} -> {face}")]
    Functoriality { sub: String, mid: String, face: String },
    #[error("{0}")]
    Syntax(String),
    #[error("refinement map is not order-preserving")]
    NotOrderPreserving,
    #[error("restriction {sub} -> {face} does not preserve polynomial degree {degree}")]
    DegreeNotPreserved { sub: String, face: String, degree: u32 },
    #[error("face {0} has a localized chart; only polynomial charts carry truncated layers")]
    NotPolynomial(String),
}
