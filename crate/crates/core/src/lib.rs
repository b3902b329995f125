pub mod cache;
pub mod chardual;
pub mod cohomology;
pub mod error;
pub mod group;
pub mod input;
pub mod lattice;
pub mod linalg;
pub mod report;
pub mod scan;

pub use error::{Error, Result};
