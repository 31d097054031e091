//! Normalized Ricci flow on homogeneous spaces with a small number of
//! isotropy summands, its Poincaré compactification, and the Einstein
//! metrics that appear as singularities at infinity.

pub mod compactify;
pub mod curvature;
pub mod error;
pub mod flowfield;
pub mod integrate;
pub mod poly;
pub mod report;
pub mod rootfind;
pub mod spaces;

pub use error::{Error, Result};
