//! Verification engine for finite generalized quadrangles, their subtended
//! ovoids, and covers of the ovoid geometry.

pub mod automorphisms;
pub mod constructions;
pub mod covers;
pub mod error;
pub mod field;
pub mod incidence;
pub mod io;
pub mod kk_census;
pub mod spg;
pub mod subgeometry;
pub mod subtension;
pub mod suites;

pub use error::{Error, Result};
pub use incidence::{GQOrder, GqViolation, IncidenceStructure};
pub use subgeometry::SubGeometryEmbedding;
