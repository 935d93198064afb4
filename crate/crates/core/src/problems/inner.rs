//! Accelerated projected gradient for `max g(cᵀz)` over a convex set, where
//! `g` is a convex scalar function with bounded curvature.
//!
//! The objective is not concave, so the solver only finds stationary points;
//! several starts are tried and the best one is kept.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::vector::{dot, norm};

/// Which metric the projection onto the feasible ellipsoid uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionMetric {
    /// Optimize in `(α/‖θ‖, β)`, where the set is a Euclidean ball.
    #[default]
    Scaled,
    /// Optimize in `(α, β)` with the exact Euclidean projection.
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSettings {
    /// Stop once the generalized gradient norm is below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub metric: ProjectionMetric,
    /// Seed of the random boundary start.
    pub seed: u64,
}

impl Default for InnerSettings {
    fn default() -> Self {
        InnerSettings { tolerance: 1e-7, max_iterations: 10_000, metric: ProjectionMetric::Scaled, seed: 0 }
    }
}

impl InnerSettings {
    /// Looser tolerance for quick desk-scale runs.
    pub fn desk() -> Self {
        InnerSettings { tolerance: 1e-5, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) || self.max_iterations == 0 {
            return Err(Error::Config("inner solver needs a positive tolerance and iteration cap".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub z: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `{(α, β) : α²/‖θ‖² + ‖β‖² ≤ δ²}` with `β ∈ R^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidalFeasibleSet {
    pub theta_norm: f64,
    pub delta: f64,
}

impl EllipsoidalFeasibleSet {
    pub fn new(theta_norm: f64, delta: f64) -> Result<Self> {
        if !(theta_norm > 0.0 && theta_norm.is_finite()) {
            return Err(Error::contract("the ellipsoid needs a positive finite ‖θ‖"));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!("radius must be finite and non-negative, got {delta}")));
        }
        Ok(EllipsoidalFeasibleSet { theta_norm, delta })
    }

    pub fn gauge(&self, alpha: f64, beta: &[f64]) -> f64 {
        (alpha / self.theta_norm).powi(2) + dot(beta, beta)
    }

    pub fn contains(&self, alpha: f64, beta: &[f64]) -> bool {
        self.gauge(alpha, beta) <= self.delta * self.delta
    }

    /// Projection of `(alpha, beta)` onto the set under `metric`.
    pub fn project(&self, alpha: f64, beta: &[f64], metric: ProjectionMetric) -> (f64, Vec<f64>) {
        if self.contains(alpha, beta) {
            return (alpha, beta.to_vec());
        }
        let a = self.theta_norm;
        match metric {
            ProjectionMetric::Scaled => {
                let mut z = Vec::with_capacity(beta.len() + 1);
                z.push(alpha / a);
                z.extend_from_slice(beta);
                project_ball(&mut z, self.delta);
                (z[0] * a, z[1..].to_vec())
            }
            ProjectionMetric::Euclidean => {
                let lam = self.euclidean_multiplier(alpha, beta);
                let a2 = a * a;
                let alpha = alpha * a2 / (a2 + lam);
                let beta: Vec<f64> = beta.iter().map(|b| b / (1.0 + lam)).collect();
                let (alpha, beta) = self.snap(alpha, beta);
                (alpha, beta)
            }
        }
    }

    /// Root of `p²a²/(a²+λ)² + ‖q‖²/(1+λ)² = δ²` in `λ > 0`; the left side is
    /// decreasing, so bracketing plus bisection is enough.
    fn euclidean_multiplier(&self, alpha: f64, beta: &[f64]) -> f64 {
        let a2 = self.theta_norm * self.theta_norm;
        let q2 = dot(beta, beta);
        let d2 = self.delta * self.delta;
        let phi = |lam: f64| alpha * alpha * a2 / (a2 + lam).powi(2) + q2 / (1.0 + lam).powi(2) - d2;
        if d2 == 0.0 {
            return f64::INFINITY;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while phi(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if phi(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Radial correction so that boundary points satisfy the gauge to roundoff.
    fn snap(&self, alpha: f64, mut beta: Vec<f64>) -> (f64, Vec<f64>) {
        if self.delta == 0.0 {
            beta.iter_mut().for_each(|b| *b = 0.0);
            return (0.0, beta);
        }
        let scale = self.delta / self.gauge(alpha, &beta).sqrt();
        beta.iter_mut().for_each(|b| *b *= scale);
        (alpha * scale, beta)
    }
}

/// Radial projection onto the Euclidean ball of radius `radius`.
pub fn project_ball(z: &mut [f64], radius: f64) {
    let r = norm(z);
    if r > radius {
        let s = if r > 0.0 { radius / r } else { 0.0 };
        z.iter_mut().for_each(|v| *v *= s);
    }
}

/// A convex scalar function of `t` with `g'' ≤ curvature`.
pub trait ScalarConvex {
    /// `(g(t), g'(t))`.
    fn eval(&self, t: f64) -> (f64, f64);
    fn curvature(&self) -> f64;
}

/// Maximizes `g(cᵀz)` subject to `project` from each of `starts`, keeping the
/// best stationary point. Convergence is measured by the generalized gradient
/// at `L = curvature · ‖c‖²`.
pub fn maximize_composite<G, P>(
    g: &G,
    c: &[f64],
    project: P,
    starts: &[Vec<f64>],
    settings: &InnerSettings,
) -> Result<InnerSolution>
where
    G: ScalarConvex + ?Sized,
    P: Fn(&mut Vec<f64>),
{
    settings.validate()?;
    if starts.is_empty() {
        return Err(Error::contract("at least one start is required"));
    }
    let cc = dot(c, c);
    let lipschitz = g.curvature() * cc;
    let mut best: Option<InnerSolution> = None;
    for start in starts {
        let sol = if lipschitz == 0.0 {
            let mut z = start.clone();
            project(&mut z);
            InnerSolution { value: g.eval(dot(c, &z)).0, z, iterations: 0, converged: true }
        } else {
            fista(g, c, lipschitz, &project, start, settings)
        };
        if best.as_ref().is_none_or(|b| sol.value > b.value) {
            best = Some(sol);
        }
    }
    let best = best.expect("non-empty starts");
    if !best.converged {
        return Err(Error::InnerNotConverged { iterations: best.iterations, best: best.value });
    }
    Ok(best)
}

fn fista<G, P>(
    g: &G,
    c: &[f64],
    lipschitz: f64,
    project: &P,
    start: &[f64],
    settings: &InnerSettings,
) -> InnerSolution
where
    G: ScalarConvex + ?Sized,
    P: Fn(&mut Vec<f64>),
{
    // `-g(cᵀz)` is concave, so the quadratic upper model behind the proximal
    // step holds for every L > 0: the step estimate may shrink freely while the
    // stopping test keeps using the global curvature bound.
    let ascend = |from: &[f64], slope: f64, step: f64| -> Vec<f64> {
        let mut z: Vec<f64> = from.iter().zip(c).map(|(a, ci)| a + step * slope * ci).collect();
        project(&mut z);
        z
    };
    let residual = |z: &[f64], slope: f64| -> f64 {
        let moved = ascend(z, slope, 1.0 / lipschitz);
        lipschitz * z.iter().zip(&moved).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    };
    let mut x = start.to_vec();
    project(&mut x);
    let (mut fx, mut gx) = g.eval(dot(c, &x));
    if residual(&x, gx) < settings.tolerance {
        return InnerSolution { z: x, value: fx, iterations: 0, converged: true };
    }
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut step = 1.0 / lipschitz;
    let max_step = 1e12 / lipschitz;
    for it in 1..=settings.max_iterations {
        let (_, slope) = g.eval(dot(c, &y));
        let next = ascend(&y, slope, step);
        let (fnext, gnext) = g.eval(dot(c, &next));
        // From an accepted point the step cannot decrease the objective in
        // exact arithmetic, so a decrease there is roundoff and is accepted.
        if fnext < fx && y != x {
            // momentum overshot: restart from the last accepted point
            y.clone_from(&x);
            t = 1.0;
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = next.iter().zip(&x).map(|(nv, ov)| nv + beta * (nv - ov)).collect();
        project(&mut y);
        x = next;
        fx = fnext;
        gx = gnext;
        t = t_next;
        step = (2.0 * step).min(max_step);
        if residual(&x, gx) < settings.tolerance {
            return InnerSolution { z: x, value: fx, iterations: it, converged: true };
        }
    }
    InnerSolution { z: x, value: fx, iterations: settings.max_iterations, converged: false }
}

/// Default starts: the origin, a seeded random boundary point and its antipode.
pub fn default_starts(dim: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = RngStream::new(seed, 0x1a7e_5747);
    let mut u = rng.normal_vec(dim);
    let r = norm(&u);
    u.iter_mut().for_each(|v| *v *= radius / r);
    let anti: Vec<f64> = u.iter().map(|v| -v).collect();
    vec![vec![0.0; dim], u, anti]
}
