//! Step-size and smoothing-radius schedules.
//!
//! Besides constant values, two closed-form schedules are available for the
//! subspace method: the global one (valid for any convex Lipschitz objective)
//! and the local one (valid near a minimizer under local curvature
//! assumptions). Both fix `alpha` from the iteration budget `N`; the
//! smoothing radius is set to the largest value the corresponding accuracy
//! bound allows.

use crate::error::{Error, Result};

/// Problem constants the closed-form schedules depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryInputs {
    /// Lipschitz constant `L`.
    pub lipschitz: f64,
    /// Bound on `||x0 - x*||`.
    pub r0: f64,
    /// Target accuracy.
    pub epsilon: f64,
    /// Sub-Gaussian concentration constant; unknown in general, 1.0 by default.
    pub c: f64,
    /// Iteration budget; when absent the matching complexity bound is used.
    pub iterations: Option<u64>,
}

impl TheoryInputs {
    pub fn new(lipschitz: f64, r0: f64, epsilon: f64) -> Self {
        TheoryInputs { lipschitz, r0, epsilon, c: 1.0, iterations: None }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !(ok(self.lipschitz) && ok(self.r0) && ok(self.epsilon) && ok(self.c)) {
            return Err(Error::Config(format!("theory inputs must be positive and finite: {self:?}")));
        }
        if self.iterations == Some(0) {
            return Err(Error::Config("theory iteration budget must be positive".into()));
        }
        Ok(())
    }
}

/// `alpha = sqrt(c n) r0 / (L (d+4) sqrt(2 (n+4) N))`
pub fn step_size(n: usize, d: usize, t: &TheoryInputs, iterations: u64) -> f64 {
    let (n, d, big_n) = (n as f64, d as f64, iterations as f64);
    (t.c * n).sqrt() * t.r0 / (t.lipschitz * (d + 4.0) * (2.0 * (n + 4.0) * big_n).sqrt())
}

/// Largest `mu` with `L (d+3)^{3/2} mu / d <= epsilon / 2`.
pub fn global_smoothing(d: usize, lipschitz: f64, epsilon: f64) -> f64 {
    let d = d as f64;
    epsilon * d / (2.0 * lipschitz * (d + 3.0).powf(1.5))
}

/// Largest `mu` with `L sqrt(d) mu <= epsilon / 2`.
pub fn local_smoothing(d: usize, lipschitz: f64, epsilon: f64) -> f64 {
    epsilon / (2.0 * lipschitz * (d as f64).sqrt())
}

/// `ceil` that does not round an exact integer up because of roundoff.
fn ceil_count(raw: f64) -> u64 {
    let nearest = raw.round();
    if (raw - nearest).abs() <= 1e-12 * nearest.max(1.0) {
        nearest as u64
    } else {
        raw.ceil() as u64
    }
}

/// `N = 8 r0² L² (n+4)(d+4)² / (c² d² ε²)`, rounded up.
pub fn global_iterations(n: usize, d: usize, t: &TheoryInputs) -> u64 {
    let (n, d) = (n as f64, d as f64);
    let raw = 8.0 * t.r0.powi(2) * t.lipschitz.powi(2) * (n + 4.0) * (d + 4.0).powi(2)
        / (t.c.powi(2) * d.powi(2) * t.epsilon.powi(2));
    ceil_count(raw)
}

/// `N = 8 r0² L² (n+4)(d+4)² / (c n ε²)`, rounded up.
pub fn local_iterations(n: usize, d: usize, t: &TheoryInputs) -> u64 {
    let (n, d) = (n as f64, d as f64);
    let raw = 8.0 * t.r0.powi(2) * t.lipschitz.powi(2) * (n + 4.0) * (d + 4.0).powi(2)
        / (t.c * n * t.epsilon.powi(2));
    ceil_count(raw)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    Constant(f64),
    TheoryGlobal,
    TheoryLocal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    pub alpha: Rule,
    pub mu: Rule,
    pub theory: Option<TheoryInputs>,
}

impl ScheduleConfig {
    pub fn constant(alpha: f64, mu: f64) -> Self {
        ScheduleConfig { alpha: Rule::Constant(alpha), mu: Rule::Constant(mu), theory: None }
    }

    pub fn theory_global(inputs: TheoryInputs) -> Self {
        ScheduleConfig { alpha: Rule::TheoryGlobal, mu: Rule::TheoryGlobal, theory: Some(inputs) }
    }

    pub fn theory_local(inputs: TheoryInputs) -> Self {
        ScheduleConfig { alpha: Rule::TheoryLocal, mu: Rule::TheoryLocal, theory: Some(inputs) }
    }

    pub fn uses_theory(&self) -> bool {
        !matches!((self.alpha, self.mu), (Rule::Constant(_), Rule::Constant(_)))
    }

    /// Resolves `(alpha, mu)` for ambient dimension `n` and subspace dimension
    /// `d`. Theory rules require `d` and the theory inputs.
    pub fn resolve(&self, n: usize, d: Option<usize>) -> Result<(f64, f64)> {
        let theory = || -> Result<(usize, TheoryInputs)> {
            let d = d.ok_or_else(|| {
                Error::Config("theory schedules apply to the subspace method only".into())
            })?;
            let t = self
                .theory
                .ok_or_else(|| Error::Config("theory schedule requires L, r0 and epsilon".into()))?;
            t.validate()?;
            Ok((d, t))
        };
        let alpha = match self.alpha {
            Rule::Constant(a) => a,
            Rule::TheoryGlobal => {
                let (d, t) = theory()?;
                step_size(n, d, &t, t.iterations.unwrap_or_else(|| global_iterations(n, d, &t)))
            }
            Rule::TheoryLocal => {
                let (d, t) = theory()?;
                step_size(n, d, &t, t.iterations.unwrap_or_else(|| local_iterations(n, d, &t)))
            }
        };
        let mu = match self.mu {
            Rule::Constant(m) => m,
            Rule::TheoryGlobal => {
                let (d, t) = theory()?;
                global_smoothing(d, t.lipschitz, t.epsilon)
            }
            Rule::TheoryLocal => {
                let (d, t) = theory()?;
                local_smoothing(d, t.lipschitz, t.epsilon)
            }
        };
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("step size must be non-negative, got {alpha}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!("smoothing radius must be positive, got {mu}")));
        }
        Ok((alpha, mu))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_bound_arithmetic() {
        // 8 * 1 * 1 * 104 * 14^2 / (1 * 100 * 0.25) = 163072 / 25 = 6522.88
        let t = TheoryInputs::new(1.0, 1.0, 0.5);
        assert_eq!(global_iterations(100, 10, &t), 6523);
    }

    #[test]
    fn local_bound_is_dimension_light() {
        let t = TheoryInputs::new(1.0, 1.0, 0.5);
        // 8 * 104 * 196 / (100 * 0.25) is the same number when n = d^2 = 100
        assert_eq!(local_iterations(100, 10, &t), 6523);
        assert!(local_iterations(10_000, 10, &t) < global_iterations(10_000, 10, &t));
    }

    #[test]
    fn theory_rules_need_subspace_and_inputs() {
        let s = ScheduleConfig::theory_global(TheoryInputs::new(1.0, 1.0, 0.1));
        assert!(s.resolve(10, None).is_err());
        let mut missing = s;
        missing.theory = None;
        assert!(missing.resolve(10, Some(2)).is_err());
        assert!(s.resolve(10, Some(2)).is_ok());
    }

    #[test]
    fn constant_rules_pass_through() {
        assert_eq!(ScheduleConfig::constant(0.1, 1e-8).resolve(5, None).unwrap(), (0.1, 1e-8));
        assert!(ScheduleConfig::constant(0.1, 0.0).resolve(5, None).is_err());
    }
}
