//! The outer optimization loop and its trace.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::oracle::{BlackBoxObjective, Objective};
use crate::par::Execution;
use crate::rng::RngStream;
use crate::vector::{self, DenseVector};

use super::schedule::ScheduleConfig;
use super::step::{minibatch_step, Method};

/// Stopping limits; whichever is hit first ends the run. A step is only taken
/// when it fits entirely inside the oracle budget.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Budget {
    pub max_iterations: Option<u64>,
    pub max_oracle_calls: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn iterations(n: u64) -> Self {
        Budget { max_iterations: Some(n), ..Budget::default() }
    }

    pub fn oracle_calls(n: u64) -> Self {
        Budget { max_oracle_calls: Some(n), ..Budget::default() }
    }

    pub fn time(limit: Duration) -> Self {
        Budget { max_time: Some(limit), ..Budget::default() }
    }

    fn is_unbounded(&self) -> bool {
        self.max_iterations.is_none() && self.max_oracle_calls.is_none() && self.max_time.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub schedule: ScheduleConfig,
    pub batch: usize,
    pub budget: Budget,
    /// Record a trace row every this many iterations (and always at the end).
    pub trace_every: u64,
    /// Stop once a recorded value is at or below this.
    pub target: Option<f64>,
    pub exec: Execution,
}

impl RunConfig {
    pub fn new(method: Method, schedule: ScheduleConfig, budget: Budget) -> Self {
        RunConfig {
            method,
            schedule,
            batch: 1,
            budget,
            trace_every: 1,
            target: None,
            exec: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.trace_every == 0 {
            return Err(Error::Config("trace_every must be at least 1".into()));
        }
        if self.budget.is_unbounded() {
            return Err(Error::Config("at least one budget limit is required".into()));
        }
        if let Method::Subspace { d } = self.method {
            if d == 0 {
                return Err(Error::Config("subspace dimension must be at least 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: u64,
    pub oracle_calls: u64,
    pub value: f64,
    pub best_value: f64,
    /// `‖x_k − x_{k−1}‖`; zero for the initial row.
    pub step_norm: f64,
    /// Time spent in optimizer steps, excluding monitoring evaluations.
    pub elapsed_ns: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    IterationBudget,
    OracleBudget,
    TimeBudget,
    TargetReached,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::IterationBudget => "iterations",
            Termination::OracleBudget => "oracle_calls",
            Termination::TimeBudget => "time",
            Termination::TargetReached => "target",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    pub final_x: DenseVector,
    pub best_x: DenseVector,
    pub best_value: f64,
    pub last_value: f64,
    pub iterations: u64,
    pub oracle_calls: u64,
    pub alpha: f64,
    pub mu: f64,
    pub termination: Termination,
}

/// Runs the configured method from `x0`. Iteration `k` draws from
/// `rng.substream(k)`. Monitoring values come from uncounted diagnostic
/// evaluations at recorded rows; the best iterate is the best recorded one.
pub fn run<O: Objective>(
    obj: &BlackBoxObjective<O>,
    x0: &DenseVector,
    config: &RunConfig,
    rng: &RngStream,
) -> Result<RunTrace> {
    config.validate()?;
    let n = obj.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    if let Method::Subspace { d } = config.method {
        if d > n {
            return Err(Error::Config(format!("subspace dimension {d} exceeds problem dimension {n}")));
        }
    }
    let (alpha, mu) = config.schedule.resolve(n, config.method.subspace_dim())?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::Config(format!("step size must be finite and non-negative, got {alpha}")));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Config(format!("smoothing radius must be positive, got {mu}")));
    }

    let per_step = config.method.calls_per_step(config.batch);
    let start_calls = obj.calls();
    let budget = config.budget;

    let mut x = x0.clone();
    let f0 = obj.diagnostic(&x)?;
    let mut records = vec![TraceRecord {
        iteration: 0,
        oracle_calls: 0,
        value: f0,
        best_value: f0,
        step_norm: 0.0,
        elapsed_ns: 0,
    }];
    let mut best_x = x.clone();
    let mut best_value = f0;
    let mut last_value = f0;
    let mut last_recorded = 0u64;
    let mut last_step_norm = 0.0;
    let mut elapsed = Duration::ZERO;
    let mut k = 0u64;

    let reached = |v: f64| config.target.is_some_and(|t| v <= t);

    let termination = loop {
        if reached(last_value) && last_recorded == k {
            break Termination::TargetReached;
        }
        if budget.max_iterations.is_some_and(|m| k >= m) {
            break Termination::IterationBudget;
        }
        let used = obj.calls() - start_calls;
        if budget.max_oracle_calls.is_some_and(|m| used + per_step > m) {
            break Termination::OracleBudget;
        }
        if budget.max_time.is_some_and(|m| elapsed >= m) {
            break Termination::TimeBudget;
        }

        let started = Instant::now();
        let next = minibatch_step(obj, &x, alpha, mu, config.batch, &config.method, config.exec, &rng.substream(k))
            .map_err(|e| match e {
                Error::NonFiniteEntry { .. } => Error::NonFiniteIterate { iteration: k + 1 },
                other => other,
            })?;
        elapsed += started.elapsed();
        last_step_norm = step_distance(&x, &next);
        x = next;
        k += 1;

        if k.is_multiple_of(config.trace_every) {
            last_value = obj.diagnostic(&x)?;
            if last_value < best_value {
                best_value = last_value;
                best_x = x.clone();
            }
            last_recorded = k;
            records.push(TraceRecord {
                iteration: k,
                oracle_calls: obj.calls() - start_calls,
                value: last_value,
                best_value,
                step_norm: last_step_norm,
                elapsed_ns: elapsed.as_nanos() as u64,
            });
        }
    };

    if last_recorded != k {
        last_value = obj.diagnostic(&x)?;
        if last_value < best_value {
            best_value = last_value;
            best_x = x.clone();
        }
        records.push(TraceRecord {
            iteration: k,
            oracle_calls: obj.calls() - start_calls,
            value: last_value,
            best_value,
            step_norm: last_step_norm,
            elapsed_ns: elapsed.as_nanos() as u64,
        });
    }

    Ok(RunTrace {
        records,
        final_x: x,
        best_x,
        best_value,
        last_value,
        iterations: k,
        oracle_calls: obj.calls() - start_calls,
        alpha,
        mu,
        termination,
    })
}

fn step_distance(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    vector::norm(&diff)
}
