//! Signed tree associahedra: building blocks, nested complexes, spines,
//! the sweep fan, vertex and facet descriptions, and Minkowski coefficients.

pub mod blocks;
pub mod cli;
pub mod complex;
pub mod corpus;
pub mod error;
pub mod fan;
pub mod flip_order;
pub mod geometry;
pub mod minkowski;
pub mod spine;
pub mod tree;
pub mod vset;

pub use blocks::BuildingSet;
pub use error::{Error, Result};
pub use spine::Spine;
pub use tree::{SignedTree, Sign, VertexId};
pub use vset::VSet;
