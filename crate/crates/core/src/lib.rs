//! Derivative-free convex minimization by Gaussian-smoothing random search,
//! in the full space and on random low-dimensional subspaces.

pub mod data;
pub mod error;
pub mod linalg;
pub mod optim;
pub mod oracle;
pub mod par;
pub mod problems;
pub mod rng;
pub mod smoothing;
pub mod sparse;
pub mod stats;
pub mod vector;
pub mod verify;

pub use error::{Error, Result};
pub use oracle::{BlackBoxObjective, FnObjective, Objective};
pub use rng::RngStream;
pub use sparse::SparseMatrix;
pub use vector::DenseVector;
