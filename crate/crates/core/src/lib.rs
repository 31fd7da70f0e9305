//! Mining generalized multimodal graph patterns from RDF knowledge graphs.

pub mod base;
pub mod domain;
pub mod emit;
pub mod error;
pub mod miner;
pub mod pattern;
pub mod ranges;
pub mod rdf;

pub use domain::Domain;
pub use error::{Error, Result};
