//! Gallery model for crystals, vertex galleries and MV-polytopes, with a
//! type A matrix model of the affine building used to check retractions.

pub mod affine_sl;
pub mod affine_weyl;
pub mod cli;
pub mod crystal;
pub mod error;
pub mod gallery;
pub mod laurent;
pub mod mv_polytope;
pub mod root_system;
pub mod sections;

pub use error::{Error, Result};
