//! Random search optimizers and their parameter schedules.

mod run;
mod schedule;
mod sketch;
mod step;

pub use run::{run, Budget, RunConfig, RunTrace, Termination, TraceRecord};
pub use schedule::{
    global_iterations, global_smoothing, local_iterations, local_smoothing, step_size, Rule,
    ScheduleConfig, TheoryInputs,
};
pub use sketch::SubspaceSketch;
pub use step::{minibatch_step, rgf_step, subspace_rgf_step, subspace_step_with_sketch, Method};
