//! The function-value oracle.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::optim::SubspaceSketch;

/// A function that can only be queried for values.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64>;

    /// Value of the restriction `u ↦ f(base + scale · P u)` for the sketch `P`.
    ///
    /// The default materialises the point and calls [`Objective::value`].
    /// Problems whose evaluation simplifies on a subspace override it.
    fn sketched_value(&self, base: &[f64], sketch: &SubspaceSketch, u: &[f64]) -> Result<f64> {
        let mut point = base.to_vec();
        sketch.lift_into(u, 1.0, &mut point);
        self.value(&point)
    }
}

impl<O: Objective + ?Sized> Objective for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        (**self).value(x)
    }

    fn sketched_value(&self, base: &[f64], sketch: &SubspaceSketch, u: &[f64]) -> Result<f64> {
        (**self).sketched_value(base, sketch, u)
    }
}

impl<O: Objective + ?Sized> Objective for Box<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        (**self).value(x)
    }

    fn sketched_value(&self, base: &[f64], sketch: &SubspaceSketch, u: &[f64]) -> Result<f64> {
        (**self).sketched_value(base, sketch, u)
    }
}

/// Adapts a plain closure.
pub struct FnObjective<F> {
    dim: usize,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnObjective { dim, f }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok((self.f)(x))
    }
}

/// Counting wrapper around an [`Objective`]; the only handle optimizers get.
///
/// Every call to [`eval`](Self::eval) or [`eval_sketched`](Self::eval_sketched)
/// counts as one oracle call. Monitoring evaluations made on behalf of traces go
/// through [`diagnostic`](Self::diagnostic) and are tallied separately.
pub struct BlackBoxObjective<O> {
    inner: O,
    calls: AtomicU64,
    diagnostics: AtomicU64,
}

impl<F> BlackBoxObjective<FnObjective<F>>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn from_fn(dim: usize, f: F) -> Self {
        BlackBoxObjective::new(FnObjective::new(dim, f))
    }
}

impl<O: Objective> BlackBoxObjective<O> {
    pub fn new(inner: O) -> Self {
        BlackBoxObjective { inner, calls: AtomicU64::new(0), diagnostics: AtomicU64::new(0) }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn diagnostic_calls(&self) -> u64 {
        self.diagnostics.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
        self.diagnostics.store(0, Ordering::Relaxed);
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }

    fn finite(value: f64) -> Result<f64> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFiniteValue { value })
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        Self::finite(self.inner.value(x)?)
    }

    /// One oracle call of `h(u) = f(base + scale · P u)`.
    pub fn eval_sketched(&self, base: &[f64], sketch: &SubspaceSketch, u: &[f64]) -> Result<f64> {
        self.check_dim(base.len())?;
        if sketch.ambient_dim() != self.dim() || u.len() != sketch.subspace_dim() {
            return Err(Error::DimensionMismatch {
                expected: sketch.subspace_dim(),
                got: u.len(),
            });
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        Self::finite(self.inner.sketched_value(base, sketch, u)?)
    }

    /// Uncounted (as oracle calls) evaluation used for monitoring.
    pub fn diagnostic(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        self.diagnostics.fetch_add(1, Ordering::Relaxed);
        Self::finite(self.inner.value(x)?)
    }
}
