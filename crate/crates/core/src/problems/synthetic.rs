//! Small convex test functions with known minimizers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::rng::RngStream;
use crate::vector::{dot, norm, DenseVector};

#[derive(Debug, Clone, PartialEq)]
pub enum Synthetic {
    /// `‖x − x*‖₂`, 1-Lipschitz.
    Distance { center: Vec<f64> },
    /// `‖x − x*‖₁`, `√n`-Lipschitz.
    L1 { center: Vec<f64> },
    /// `max_i (a_iᵀx + b_i)` with `a_i` the rows of `slopes`.
    MaxAffine { slopes: Vec<Vec<f64>>, offsets: Vec<f64> },
    /// `‖A x − b‖² / (2m)`.
    LeastSquares { matrix: Vec<Vec<f64>>, rhs: Vec<f64> },
    /// `‖x − x*‖² / 2`.
    Quadratic { center: Vec<f64> },
}

impl Synthetic {
    pub const NAMES: [&'static str; 5] = ["distance", "l1", "max-affine", "least-squares", "quadratic"];

    /// A random instance of the named family in dimension `n`.
    pub fn random(name: &str, n: usize, rng: &mut RngStream) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        let scale = 1.0 / (n as f64).sqrt();
        Ok(match name {
            "distance" => Synthetic::Distance { center: rng_scaled(rng, n, scale) },
            "l1" => Synthetic::L1 { center: rng_scaled(rng, n, scale) },
            "quadratic" => Synthetic::Quadratic { center: rng_scaled(rng, n, scale) },
            "max-affine" => {
                let k = 2 * n + 1;
                let slopes = (0..k).map(|_| rng.normal_vec(n)).collect();
                let offsets = rng.normal_vec(k);
                Synthetic::MaxAffine { slopes, offsets }
            }
            "least-squares" => {
                let m = 2 * n;
                let matrix = (0..m).map(|_| rng.normal_vec(n)).collect();
                let rhs = rng.normal_vec(m);
                Synthetic::LeastSquares { matrix, rhs }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown synthetic objective '{other}' (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Synthetic::Distance { .. } => "distance",
            Synthetic::L1 { .. } => "l1",
            Synthetic::MaxAffine { .. } => "max-affine",
            Synthetic::LeastSquares { .. } => "least-squares",
            Synthetic::Quadratic { .. } => "quadratic",
        }
    }

    /// Global Lipschitz constant, when one exists.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            Synthetic::Distance { .. } => Some(1.0),
            Synthetic::L1 { center } => Some((center.len() as f64).sqrt()),
            Synthetic::MaxAffine { slopes, .. } => Some(slopes.iter().map(|a| norm(a)).fold(0.0, f64::max)),
            Synthetic::LeastSquares { .. } | Synthetic::Quadratic { .. } => None,
        }
    }

    /// A minimizer, when it is known in closed form.
    pub fn minimizer(&self) -> Option<DenseVector> {
        match self {
            Synthetic::Distance { center } | Synthetic::L1 { center } | Synthetic::Quadratic { center } => {
                DenseVector::new(center.clone()).ok()
            }
            Synthetic::LeastSquares { matrix, rhs } => {
                let a = to_matrix(matrix);
                let b = DVector::from_column_slice(rhs);
                let x = (a.transpose() * &a).cholesky()?.solve(&(a.transpose() * b));
                DenseVector::new(x.iter().copied().collect()).ok()
            }
            Synthetic::MaxAffine { .. } => None,
        }
    }

    /// Gradient for the smooth members of the catalog.
    pub fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            Synthetic::Quadratic { center } => Some(x.iter().zip(center).map(|(a, c)| a - c).collect()),
            Synthetic::LeastSquares { matrix, rhs } => {
                let m = matrix.len() as f64;
                let mut g = vec![0.0; x.len()];
                for (row, b) in matrix.iter().zip(rhs) {
                    let r = dot(row, x) - b;
                    g.iter_mut().zip(row).for_each(|(gi, a)| *gi += r * a / m);
                }
                Some(g)
            }
            _ => None,
        }
    }
}

fn rng_scaled(rng: &mut RngStream, n: usize, scale: f64) -> Vec<f64> {
    rng.normal_vec(n).into_iter().map(|v| v * scale).collect()
}

fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

impl Objective for Synthetic {
    fn dim(&self) -> usize {
        match self {
            Synthetic::Distance { center } | Synthetic::L1 { center } | Synthetic::Quadratic { center } => center.len(),
            Synthetic::MaxAffine { slopes, .. } => slopes[0].len(),
            Synthetic::LeastSquares { matrix, .. } => matrix[0].len(),
        }
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(match self {
            Synthetic::Distance { center } => x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt(),
            Synthetic::L1 { center } => x.iter().zip(center).map(|(a, c)| (a - c).abs()).sum(),
            Synthetic::Quadratic { center } => 0.5 * x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>(),
            Synthetic::MaxAffine { slopes, offsets } => slopes
                .iter()
                .zip(offsets)
                .map(|(a, b)| dot(a, x) + b)
                .fold(f64::NEG_INFINITY, f64::max),
            Synthetic::LeastSquares { matrix, rhs } => {
                let m = matrix.len() as f64;
                matrix.iter().zip(rhs).map(|(a, b)| (dot(a, x) - b).powi(2)).sum::<f64>() / (2.0 * m)
            }
        })
    }
}
