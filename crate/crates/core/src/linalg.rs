//! Small dense symmetric eigenproblems, via nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::contract("matrix has non-finite entries"));
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    Ok(symmetric_eigenvalues(m)?[0])
}

/// Smallest singular value of a tall (or square) matrix.
pub fn min_singular_value(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() < m.ncols() {
        return Err(Error::contract("expected at least as many rows as columns"));
    }
    Ok(min_eigenvalue(&m.tr_mul(m))?.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_spectrum() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0]));
        assert_eq!(symmetric_eigenvalues(&m).unwrap(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn singular_value_of_column() {
        let m = DMatrix::from_column_slice(2, 1, &[3.0, 4.0]);
        assert!((min_singular_value(&m).unwrap() - 5.0).abs() < 1e-12);
    }
}
