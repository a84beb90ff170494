//! Random trees, sampled distance matrices, and their long-dendron limits.
//!
//! Generators emit [`RootedTree`]s; [`LcaIndex`] answers distance queries;
//! [`metric::rho_r`] samples scaled distance matrices which [`analysis`]
//! compares against [`dendrons`].

pub mod analysis;
pub mod dendrons;
pub mod error;
pub mod generators;
pub mod histogram;
pub mod lca;
pub mod metric;
pub mod oracle;
pub mod rmq;
pub mod rng;
pub mod special;
pub mod tree;

pub use error::{Error, Result};
pub use histogram::Histogram;
pub use lca::LcaIndex;
pub use metric::DistanceMatrix;
pub use tree::{RootedTree, TreeRecord};
