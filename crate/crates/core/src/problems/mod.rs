//! Benchmark objectives.

pub mod inner;
pub mod recover;
pub mod robust;
pub mod softmax;
pub mod synthetic;

pub use inner::{EllipsoidalFeasibleSet, InnerSettings, InnerSolution, ProjectionMetric};
pub use recover::{gram_matrix, recover_eta, stacked_matrix};
pub use robust::{RobustLogisticProblem, SubspaceInner};
pub use softmax::SoftmaxL1Problem;
pub use synthetic::Synthetic;
