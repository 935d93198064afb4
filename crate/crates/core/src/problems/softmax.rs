//! Multinomial logistic (softmax) regression with an L1 penalty.

use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::sparse::SparseMatrix;

/// Parameters are laid out as `w_1, …, w_c` (each of length `p`) followed by
/// `b_1, …, b_c`, so the dimension is `c (p + 1)`. Class `k` (0-based) owns
/// block `k`.
#[derive(Debug, Clone)]
pub struct SoftmaxL1Problem {
    data: SparseMatrix,
    labels: Vec<usize>,
    classes: usize,
    lambda: f64,
}

impl SoftmaxL1Problem {
    /// `labels` are 0-based class indices below `classes`.
    pub fn new(data: SparseMatrix, labels: Vec<usize>, classes: usize, lambda: f64) -> Result<Self> {
        if labels.len() != data.rows() {
            return Err(Error::DimensionMismatch { expected: data.rows(), got: labels.len() });
        }
        if data.rows() == 0 {
            return Err(Error::Config("dataset has no samples".into()));
        }
        if classes < 2 {
            return Err(Error::Config(format!("softmax needs at least 2 classes, got {classes}")));
        }
        if let Some(bad) = labels.iter().find(|&&y| y >= classes) {
            return Err(Error::Config(format!("label index {bad} out of range for {classes} classes")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be finite and non-negative, got {lambda}")));
        }
        Ok(SoftmaxL1Problem { data, labels, classes, lambda })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn features(&self) -> usize {
        self.data.cols()
    }
}

impl Objective for SoftmaxL1Problem {
    fn dim(&self) -> usize {
        self.classes * (self.data.cols() + 1)
    }

    fn value(&self, params: &[f64]) -> Result<f64> {
        if params.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: params.len() });
        }
        let (p, c) = (self.data.cols(), self.classes);
        let bias = &params[c * p..];
        let mut scores = vec![0.0; c];
        let mut total = 0.0;
        for (i, &y) in self.labels.iter().enumerate() {
            let (idx, val) = self.data.row(i);
            for (k, s) in scores.iter_mut().enumerate() {
                let w = &params[k * p..(k + 1) * p];
                *s = bias[k] + idx.iter().zip(val).map(|(&j, v)| w[j] * v).sum::<f64>();
            }
            let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = top + scores.iter().map(|s| (s - top).exp()).sum::<f64>().ln();
            total += lse - scores[y];
        }
        let penalty: f64 = params.iter().map(|v| v.abs()).sum();
        Ok(total / self.labels.len() as f64 + self.lambda * penalty)
    }
}
