//! Accessibility percolation on hypercubes and general graphs, first-passage
//! site and bond percolation, and the clustering translation process.

pub mod coupling;
pub mod ctp;
pub mod experiments;
pub mod fpp;
pub mod graph;
pub mod landscape;
pub mod numerics;
pub mod parallel;
pub mod rng;

pub use graph::{GraphModel, Path, VertexId};
pub use landscape::FitnessLandscape;
pub use parallel::Execution;
