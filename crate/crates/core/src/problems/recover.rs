//! Lifting a solution of the subspace inner problem back to a full-space
//! perturbation of minimum norm.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::optim::SubspaceSketch;
use crate::vector::{norm, DenseVector};

/// Condition numbers above this are treated as singular.
const MAX_CONDITION: f64 = 1e12;

/// `A` with rows `θᵀ/‖θ‖` and the columns of `P/√n` (as rows): `(d+1)×n`.
pub fn stacked_matrix(theta: &[f64], sketch: &SubspaceSketch) -> Result<DMatrix<f64>> {
    let n = theta.len();
    let d = sketch.subspace_dim();
    if sketch.ambient_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: sketch.ambient_dim() });
    }
    if d + 1 >= n {
        return Err(Error::contract(format!("recovery needs d + 1 < n, got d = {d}, n = {n}")));
    }
    let tn = norm(theta);
    if tn == 0.0 {
        return Err(Error::contract("recovery needs θ ≠ 0"));
    }
    let s = sketch.scale();
    Ok(DMatrix::from_fn(d + 1, n, |r, c| if r == 0 { theta[c] / tn } else { s * sketch.entry(c, r - 1) }))
}

/// `A Aᵀ`, the Gram matrix whose smallest eigenvalue controls recovery.
pub fn gram_matrix(theta: &[f64], sketch: &SubspaceSketch) -> Result<DMatrix<f64>> {
    let a = stacked_matrix(theta, sketch)?;
    Ok(&a * a.transpose())
}

/// `η = Aᵀ (A Aᵀ)⁻¹ z`, so that `θᵀη / ‖θ‖ = z₀` and `Pᵀη / √n = z₁..`.
pub fn recover_eta(theta: &[f64], sketch: &SubspaceSketch, z: &[f64]) -> Result<DenseVector> {
    let a = stacked_matrix(theta, sketch)?;
    if z.len() != a.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: z.len() });
    }
    let gram = &a * a.transpose();
    let ev = symmetric_eigenvalues(&gram)?;
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::Singular { condition });
    }
    let chol = gram.cholesky().ok_or(Error::Singular { condition })?;
    let y = chol.solve(&DVector::from_column_slice(z));
    DenseVector::new((a.transpose() * y).iter().copied().collect())
}
