//! Exact tools for L-shaped embeddings of trees with maximum degree four
//! in point sets: point-set and tree enumeration up to symmetry, a
//! backtracking embedder, a SAT encoding with a built-in solver, and
//! exhaustive verification sweeps.

pub mod embed;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod registry;
pub mod sat;
pub mod trees;

pub use embed::{count_embeddings, embed, embed_ordered, validate, EmbedConfig, Embedding};
pub use error::{Error, Result};
pub use geometry::{PointSet, StaircaseSpec, SymmetryGroup, SymmetryOp};
pub use registry::{load_instance, Expected, InstanceRecord, Tier};
pub use trees::{AnyTree, OrderedTree, Tree};
