//! Adversarially robust logistic regression with an L1 penalty.
//!
//! `f(θ) = max_{‖η‖ ≤ δ} G_θ(θᵀη) + λ‖θ‖₁`, where `θ = (w, b)` and
//! `G_θ(t) = (1/m) Σ log(1 + exp(-y_i (t + wᵀx_i + b)))`.

use crate::error::{Error, Result};
use crate::optim::SubspaceSketch;
use crate::oracle::Objective;
use crate::sparse::SparseMatrix;
use crate::vector::{dot, norm};

use super::inner::{
    default_starts, maximize_composite, project_ball, EllipsoidalFeasibleSet, InnerSettings,
    InnerSolution, ProjectionMetric, ScalarConvex,
};

/// `log(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// The data term as a function of the shared margin shift `t`.
#[derive(Debug, Clone)]
pub struct ShiftedLogistic {
    margins: Vec<f64>,
    labels: Vec<f64>,
}

impl ShiftedLogistic {
    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }
}

impl ScalarConvex for ShiftedLogistic {
    fn eval(&self, t: f64) -> (f64, f64) {
        let m = self.margins.len() as f64;
        let (mut v, mut s) = (0.0, 0.0);
        for (r, y) in self.margins.iter().zip(&self.labels) {
            let z = -(r + y * t);
            v += softplus(z);
            s -= y * sigmoid(z);
        }
        (v / m, s / m)
    }

    fn curvature(&self) -> f64 {
        0.25
    }
}

/// Maximizer of the subspace inner problem in `(α, β)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceInner {
    pub alpha: f64,
    pub beta: Vec<f64>,
    /// Maximal data term, without the penalty.
    pub value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct RobustLogisticProblem {
    data: SparseMatrix,
    labels: Vec<f64>,
    lambda: f64,
    delta: f64,
    inner: InnerSettings,
}

impl RobustLogisticProblem {
    /// `labels` must be ±1.
    pub fn new(
        data: SparseMatrix,
        labels: &[i64],
        lambda: f64,
        delta: f64,
        inner: InnerSettings,
    ) -> Result<Self> {
        if labels.len() != data.rows() {
            return Err(Error::DimensionMismatch { expected: data.rows(), got: labels.len() });
        }
        if data.rows() == 0 {
            return Err(Error::Config("dataset has no samples".into()));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
            return Err(Error::Config(format!("robust logistic labels must be ±1, found {bad}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be finite and non-negative, got {lambda}")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!("delta must be finite and non-negative, got {delta}")));
        }
        inner.validate()?;
        let labels = labels.iter().map(|&y| y as f64).collect();
        Ok(RobustLogisticProblem { data, labels, lambda, delta, inner })
    }

    pub fn features(&self) -> usize {
        self.data.cols()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn inner_settings(&self) -> &InnerSettings {
        &self.inner
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: theta.len() });
        }
        if let Some(index) = theta.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { index });
        }
        Ok(())
    }

    /// `G_θ` for the parameters `θ = (w, b)`.
    pub fn loss_curve(&self, theta: &[f64]) -> Result<ShiftedLogistic> {
        self.check(theta)?;
        let p = self.features();
        let (w, b) = (&theta[..p], theta[p]);
        let margins = (0..self.data.rows())
            .map(|i| self.labels[i] * (self.data.row_dot_unchecked(i, w) + b))
            .collect();
        Ok(ShiftedLogistic { margins, labels: self.labels.clone() })
    }

    /// `λ (‖w‖₁ + |b|)`.
    pub fn penalty(&self, theta: &[f64]) -> f64 {
        self.lambda * theta.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Loss with a fixed perturbation `η`: `G_θ(θᵀη) + penalty`.
    pub fn perturbed_value(&self, theta: &[f64], eta: &[f64]) -> Result<f64> {
        let curve = self.loss_curve(theta)?;
        Ok(curve.value(dot(theta, eta)) + self.penalty(theta))
    }

    /// Full-space inner maximization over `‖η‖ ≤ δ`.
    pub fn full_inner(&self, theta: &[f64]) -> Result<InnerSolution> {
        let curve = self.loss_curve(theta)?;
        let n = theta.len();
        let delta = self.delta;
        let starts = default_starts(n, delta, self.inner.seed);
        maximize_composite(&curve, theta, |z| project_ball(z, delta), &starts, &self.inner)
    }

    /// Subspace inner maximization: `max G_θ(α + uᵀβ)` over
    /// `α²/‖θ_k‖² + ‖β‖² ≤ δ²`, where the data term is taken at
    /// `θ = θ_k + P u / √n`. With `θ_k = 0` the `α` coordinate is dropped.
    pub fn subspace_inner(&self, theta_k: &[f64], sketch: &SubspaceSketch, u: &[f64]) -> Result<SubspaceInner> {
        Ok(self.subspace_inner_lifted(theta_k, sketch, u)?.0)
    }

    /// The inner solution together with the lifted point `θ_k + P u / √n`.
    fn subspace_inner_lifted(
        &self,
        theta_k: &[f64],
        sketch: &SubspaceSketch,
        u: &[f64],
    ) -> Result<(SubspaceInner, Vec<f64>)> {
        self.check(theta_k)?;
        let (n, d) = (self.dim(), sketch.subspace_dim());
        if sketch.ambient_dim() != n || u.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: u.len() });
        }
        if d + 1 >= n {
            return Err(Error::contract(format!("subspace problem needs d + 1 < n, got d = {d}, n = {n}")));
        }
        let mut theta = theta_k.to_vec();
        sketch.lift_into(u, 1.0, &mut theta);
        let curve = self.loss_curve(&theta)?;
        Ok((self.solve_subspace(&curve, norm(theta_k), u)?, theta))
    }

    fn solve_subspace(&self, curve: &ShiftedLogistic, theta_norm: f64, u: &[f64]) -> Result<SubspaceInner> {
        let delta = self.delta;
        let d = u.len();
        if theta_norm == 0.0 {
            let starts = default_starts(d, delta, self.inner.seed);
            let sol = maximize_composite(curve, u, |z| project_ball(z, delta), &starts, &self.inner)?;
            return Ok(SubspaceInner { alpha: 0.0, beta: sol.z, value: sol.value, iterations: sol.iterations });
        }
        let starts = default_starts(d + 1, delta, self.inner.seed);
        match self.inner.metric {
            ProjectionMetric::Scaled => {
                let mut c = Vec::with_capacity(d + 1);
                c.push(theta_norm);
                c.extend_from_slice(u);
                let sol = maximize_composite(curve, &c, |z| project_ball(z, delta), &starts, &self.inner)?;
                Ok(SubspaceInner {
                    alpha: sol.z[0] * theta_norm,
                    beta: sol.z[1..].to_vec(),
                    value: sol.value,
                    iterations: sol.iterations,
                })
            }
            ProjectionMetric::Euclidean => {
                let set = EllipsoidalFeasibleSet::new(theta_norm, delta)?;
                let mut c = Vec::with_capacity(d + 1);
                c.push(1.0);
                c.extend_from_slice(u);
                let project = |z: &mut Vec<f64>| {
                    let (a, b) = set.project(z[0], &z[1..], ProjectionMetric::Euclidean);
                    z[0] = a;
                    z[1..].copy_from_slice(&b);
                };
                let starts: Vec<Vec<f64>> = starts
                    .into_iter()
                    .map(|mut s| {
                        s[0] *= theta_norm;
                        s
                    })
                    .collect();
                let sol = maximize_composite(curve, &c, project, &starts, &self.inner)?;
                Ok(SubspaceInner {
                    alpha: sol.z[0],
                    beta: sol.z[1..].to_vec(),
                    value: sol.value,
                    iterations: sol.iterations,
                })
            }
        }
    }

    /// Robust loss at `θ` with the inner problem solved in the full space.
    pub fn robust_value(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.full_inner(theta)?.value + self.penalty(theta))
    }

    /// Oracle value of `h(u)` through the subspace inner problem.
    pub fn subspace_value(&self, theta_k: &[f64], sketch: &SubspaceSketch, u: &[f64]) -> Result<f64> {
        let (inner, theta) = self.subspace_inner_lifted(theta_k, sketch, u)?;
        Ok(inner.value + self.penalty(&theta))
    }
}

impl Objective for RobustLogisticProblem {
    fn dim(&self) -> usize {
        self.data.cols() + 1
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.robust_value(x)
    }

    fn sketched_value(&self, base: &[f64], sketch: &SubspaceSketch, u: &[f64]) -> Result<f64> {
        self.subspace_value(base, sketch, u)
    }
}
