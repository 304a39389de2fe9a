//! Hierarchical multi-resolution terrain: the gridded height field, the
//! error-driven subdivision tree built over it, and the HF1 file format.

mod field;
pub mod hf1;
mod tree;

pub use field::{GridRect, HeightField};
pub use tree::{node_error, NodeId, SizeModel, TerrainNode, TerrainTree, TreeParams};
