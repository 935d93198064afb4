//! Direction samplers and Gaussian-smoothing estimators.
//!
//! For a smoothing radius `mu`, `f_mu(x) = E_u f(x + mu u)` and its gradient is
//! estimated along a single direction by a forward or central difference
//! quotient times the direction.

use crate::error::{Error, Result};
use crate::oracle::{BlackBoxObjective, Objective};
use crate::rng::RngStream;
use crate::stats::{Moments, MonteCarlo};
use crate::vector::{norm, DenseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionKind {
    /// i.i.d. standard normal entries.
    Gaussian,
    /// Uniform on the sphere of radius `sqrt(dim)`.
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionSampler {
    pub kind: DirectionKind,
    pub dim: usize,
}

impl DirectionSampler {
    pub fn gaussian(dim: usize) -> Self {
        DirectionSampler { kind: DirectionKind::Gaussian, dim }
    }

    pub fn sphere(dim: usize) -> Self {
        DirectionSampler { kind: DirectionKind::Sphere, dim }
    }

    pub fn sample_into(&self, rng: &mut RngStream, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        rng.fill_normal(out);
        if self.kind == DirectionKind::Sphere {
            // a zero draw has probability zero; resample rather than divide by it
            let mut r = norm(out);
            while r == 0.0 {
                rng.fill_normal(out);
                r = norm(out);
            }
            let scale = (self.dim as f64).sqrt() / r;
            out.iter_mut().for_each(|v| *v *= scale);
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> DenseVector {
        let mut v = vec![0.0; self.dim];
        self.sample_into(rng, &mut v);
        DenseVector::new(v).expect("sampled directions are finite")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DifferenceScheme {
    Forward,
    Central,
}

impl DifferenceScheme {
    /// Oracle calls spent on `directions` directions sharing one base point.
    pub fn calls_per_batch(self, directions: u64) -> u64 {
        match self {
            DifferenceScheme::Central => 2 * directions,
            DifferenceScheme::Forward => directions + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParams {
    mu: f64,
    pub scheme: DifferenceScheme,
}

impl SmoothingParams {
    pub fn new(mu: f64, scheme: DifferenceScheme) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!("smoothing radius must be positive, got {mu}")));
        }
        Ok(SmoothingParams { mu, scheme })
    }

    pub fn central(mu: f64) -> Result<Self> {
        Self::new(mu, DifferenceScheme::Central)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

fn shifted(x: &[f64], t: f64, u: &[f64]) -> Vec<f64> {
    x.iter().zip(u).map(|(a, b)| a + t * b).collect()
}

/// Monte Carlo estimate of `f_mu(x)`; returns the sample moments so callers
/// get the standard error alongside the mean.
pub fn smoothed_value_estimate<O: Objective>(
    obj: &BlackBoxObjective<O>,
    x: &[f64],
    params: &SmoothingParams,
    sampler: &DirectionSampler,
    mc: MonteCarlo,
    rng: &RngStream,
) -> Result<Moments> {
    if mc.trials == 0 {
        return Err(Error::contract("at least one sample is required"));
    }
    if sampler.dim != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: sampler.dim });
    }
    let mu = params.mu();
    mc.try_scalar(rng, |r| {
        let mut u = vec![0.0; sampler.dim];
        sampler.sample_into(r, &mut u);
        obj.eval(&shifted(x, mu, &u))
    })
}

/// Single-direction difference quotient `q` such that the estimate is `q · u`.
pub fn difference_quotient<O: Objective>(
    obj: &BlackBoxObjective<O>,
    x: &[f64],
    u: &[f64],
    params: &SmoothingParams,
) -> Result<f64> {
    if u.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: u.len() });
    }
    let mu = params.mu();
    match params.scheme {
        DifferenceScheme::Central => {
            let plus = obj.eval(&shifted(x, mu, u))?;
            let minus = obj.eval(&shifted(x, -mu, u))?;
            Ok((plus - minus) / (2.0 * mu))
        }
        DifferenceScheme::Forward => {
            let base = obj.eval(x)?;
            forward_quotient(obj, x, base, u, mu)
        }
    }
}

/// Forward quotient against an already evaluated `f(x)`.
pub fn forward_quotient<O: Objective>(
    obj: &BlackBoxObjective<O>,
    x: &[f64],
    fx: f64,
    u: &[f64],
    mu: f64,
) -> Result<f64> {
    let plus = obj.eval(&shifted(x, mu, u))?;
    Ok((plus - fx) / mu)
}

/// `g_mu(x, u)`: the difference quotient along `u` times `u`.
pub fn gradient_estimate<O: Objective>(
    obj: &BlackBoxObjective<O>,
    x: &[f64],
    u: &[f64],
    params: &SmoothingParams,
) -> Result<DenseVector> {
    let q = difference_quotient(obj, x, u, params)?;
    DenseVector::new(u.iter().map(|v| q * v).collect())
}
