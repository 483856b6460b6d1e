//! Root finding in randomly grown plane trees.
//!
//! The crate covers the full pipeline: Ulam–Harris words and plane trees,
//! seeded simulators for uniform attachment (UA) and regular UA growth,
//! the product-of-subtree-sizes centrality and the root-finding rule built
//! on it, deterministic preflows with exact `E_x` enumeration, and samplers
//! for the limiting subtree proportions.

pub mod centrality;
pub mod error;
pub mod flows;
pub mod growth;
pub mod limits;
pub mod rng;
pub mod stats;
pub mod tree;
pub mod word;

pub use error::{Error, Result};
pub use tree::PlaneTree;
pub use word::Word;
