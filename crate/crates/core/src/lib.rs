//! Cycle-domain topology and learning for functional connectivity graphs.
//!
//! The pipeline: threshold a connectivity matrix to a binary graph, split
//! its edges into a maximum spanning tree and cycle-closing extras, build
//! the cycle incidence matrix and the edge-level cycle adjacency, derive
//! spectral edge positional encodings from the cycle Laplacian, and train
//! an attention-based edge convolution network that classifies graphs while
//! reading out a sparse per-edge saliency map (the functional backbone).

pub mod cycles;
pub mod epec;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod model;
pub mod synth;
pub mod train;

pub use error::{CoreError, Result};
pub use linalg::symmetric_eigh;
