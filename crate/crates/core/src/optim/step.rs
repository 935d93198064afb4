//! Single iterations of the full-space and subspace random search methods.

use crate::error::{Error, Result};
use crate::oracle::{BlackBoxObjective, Objective};
use crate::par::{self, Execution};
use crate::rng::RngStream;
use crate::smoothing::{
    difference_quotient, forward_quotient, DifferenceScheme, DirectionKind, DirectionSampler,
    SmoothingParams,
};
use crate::vector::DenseVector;

use super::SubspaceSketch;

/// Sub-stream index reserved for the sketch matrix; direction `i` of an
/// iteration uses sub-stream `i`.
const SKETCH_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Full-space random search along `directions`-distributed vectors.
    Rgf { scheme: DifferenceScheme, directions: DirectionKind },
    /// Central differences of `u ↦ f(x + P u / sqrt(n))` along Gaussian `u ∈ R^d`.
    Subspace { d: usize },
}

impl Method {
    pub fn rgf() -> Self {
        Method::Rgf { scheme: DifferenceScheme::Central, directions: DirectionKind::Gaussian }
    }

    pub fn subspace(d: usize) -> Self {
        Method::Subspace { d }
    }

    /// Oracle calls made by one step with `batch` directions.
    pub fn calls_per_step(&self, batch: usize) -> u64 {
        match self {
            Method::Rgf { scheme, .. } => scheme.calls_per_batch(batch as u64),
            Method::Subspace { .. } => 2 * batch as u64,
        }
    }

    pub fn subspace_dim(&self) -> Option<usize> {
        match self {
            Method::Subspace { d } => Some(*d),
            Method::Rgf { .. } => None,
        }
    }
}

fn finish(x: &[f64], alpha: f64, step: &[f64]) -> Result<DenseVector> {
    DenseVector::new(x.iter().zip(step).map(|(xi, si)| xi - alpha * si).collect())
}

/// `x - alpha · g_mu(x, u)` for one direction drawn from `sampler`.
pub fn rgf_step<O: Objective>(
    obj: &BlackBoxObjective<O>,
    x: &DenseVector,
    alpha: f64,
    params: &SmoothingParams,
    sampler: &DirectionSampler,
    rng: &RngStream,
) -> Result<DenseVector> {
    if sampler.dim != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: sampler.dim });
    }
    let u = sampler.sample(&mut rng.substream(0));
    let q = difference_quotient(obj, x, &u, params)?;
    let step: Vec<f64> = u.iter().map(|v| q * v).collect();
    finish(x, alpha, &step)
}

/// Central difference quotient of `h(t) = f(x + scale · P t)` along `u`.
fn sketched_quotient<O: Objective>(
    obj: &BlackBoxObjective<O>,
    x: &[f64],
    sketch: &SubspaceSketch,
    u: &[f64],
    mu: f64,
) -> Result<f64> {
    let plus: Vec<f64> = u.iter().map(|v| mu * v).collect();
    let minus: Vec<f64> = u.iter().map(|v| -mu * v).collect();
    let hp = obj.eval_sketched(x, sketch, &plus)?;
    let hm = obj.eval_sketched(x, sketch, &minus)?;
    Ok((hp - hm) / (2.0 * mu))
}

/// One subspace step with a caller-provided sketch.
pub fn subspace_step_with_sketch<O: Objective>(
    obj: &BlackBoxObjective<O>,
    x: &DenseVector,
    alpha: f64,
    mu: f64,
    sketch: &SubspaceSketch,
    rng: &RngStream,
) -> Result<DenseVector> {
    let u = rng.substream(0).normal_vec(sketch.subspace_dim());
    let q = sketched_quotient(obj, x, sketch, &u, mu)?;
    let mut pu = vec![0.0; x.len()];
    sketch.apply(&u, &mut pu);
    let step: Vec<f64> = pu.iter().map(|v| q * v).collect();
    finish(x, alpha, &step)
}

/// Draws a fresh `n×d` sketch and a direction `u ∈ R^d`, then moves along
/// `P u` by the central difference quotient of the restricted function.
pub fn subspace_rgf_step<O: Objective>(
    obj: &BlackBoxObjective<O>,
    x: &DenseVector,
    alpha: f64,
    mu: f64,
    d: usize,
    rng: &RngStream,
) -> Result<DenseVector> {
    let sketch = SubspaceSketch::gaussian(x.len(), d, &mut rng.substream(SKETCH_STREAM))?;
    subspace_step_with_sketch(obj, x, alpha, mu, &sketch, rng)
}

/// Averaged step over `batch` directions, scaled by `alpha / sqrt(batch)`:
/// `x - alpha/sqrt(l) · Σ_i q_i v_i`.
///
/// The subspace variant shares one sketch across the batch. Directions are
/// evaluated under `exec` and summed in index order, so the result does not
/// depend on the execution policy; `batch = 1` reproduces the single-direction
/// steps exactly.
#[allow(clippy::too_many_arguments)]
pub fn minibatch_step<O: Objective>(
    obj: &BlackBoxObjective<O>,
    x: &DenseVector,
    alpha: f64,
    mu: f64,
    batch: usize,
    method: &Method,
    exec: Execution,
    rng: &RngStream,
) -> Result<DenseVector> {
    if batch == 0 {
        return Err(Error::Config("batch size must be at least 1".into()));
    }
    let n = x.len();
    let directions: Vec<(f64, Vec<f64>)> = match *method {
        Method::Rgf { scheme, directions } => {
            let sampler = DirectionSampler { kind: directions, dim: n };
            let params = SmoothingParams::new(mu, scheme)?;
            let base = match scheme {
                DifferenceScheme::Forward => Some(obj.eval(x)?),
                DifferenceScheme::Central => None,
            };
            par::try_map_range(exec, batch, |i| {
                let u = sampler.sample(&mut rng.substream(i as u64)).into_inner();
                let q = match base {
                    Some(fx) => forward_quotient(obj, x, fx, &u, mu)?,
                    None => difference_quotient(obj, x, &u, &params)?,
                };
                Ok((q, u))
            })?
        }
        Method::Subspace { d } => {
            let sketch = SubspaceSketch::gaussian(n, d, &mut rng.substream(SKETCH_STREAM))?;
            par::try_map_range(exec, batch, |i| {
                let u = rng.substream(i as u64).normal_vec(d);
                let q = sketched_quotient(obj, x, &sketch, &u, mu)?;
                let mut pu = vec![0.0; n];
                sketch.apply(&u, &mut pu);
                Ok((q, pu))
            })?
        }
    };
    let mut step = vec![0.0; n];
    for (q, v) in &directions {
        for (s, vi) in step.iter_mut().zip(v) {
            *s += q * vi;
        }
    }
    finish(x, alpha / (batch as f64).sqrt(), &step)
}
