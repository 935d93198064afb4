use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Per-iteration Gaussian sketch `P` (n×d, i.i.d. N(0,1) entries) used as
/// `u ↦ x + scale · P u` with `scale = 1/sqrt(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSketch {
    n: usize,
    d: usize,
    /// row-major n×d
    data: Vec<f64>,
    scale: f64,
}

impl SubspaceSketch {
    pub fn gaussian(n: usize, d: usize, rng: &mut RngStream) -> Result<Self> {
        if d == 0 || d > n {
            return Err(Error::Config(format!("subspace dimension must satisfy 1 <= d <= n, got d={d}, n={n}")));
        }
        Ok(SubspaceSketch { n, d, data: rng.normal_vec(n * d), scale: 1.0 / (n as f64).sqrt() })
    }

    /// Explicit matrix and scale, e.g. `sqrt(n) · I` with the default scale to
    /// make the sketch act as the identity.
    pub fn from_parts(n: usize, d: usize, data: Vec<f64>, scale: f64) -> Result<Self> {
        if data.len() != n * d {
            return Err(Error::DimensionMismatch { expected: n * d, got: data.len() });
        }
        Ok(SubspaceSketch { n, d, data, scale })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn subspace_dim(&self) -> usize {
        self.d
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.d + col]
    }

    /// Row-major n×d entries.
    pub fn matrix(&self) -> &[f64] {
        &self.data
    }

    /// `out = P u` (unscaled).
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        assert_eq!(u.len(), self.d);
        assert_eq!(out.len(), self.n);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.d)) {
            *o = row.iter().zip(u).map(|(p, v)| p * v).sum();
        }
    }

    /// `out += t · scale · P u`.
    pub fn lift_into(&self, u: &[f64], t: f64, out: &mut [f64]) {
        assert_eq!(u.len(), self.d);
        assert_eq!(out.len(), self.n);
        let s = t * self.scale;
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.d)) {
            *o += s * row.iter().zip(u).map(|(p, v)| p * v).sum::<f64>();
        }
    }

    /// `out = Pᵀ v` (unscaled).
    pub fn pullback(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n);
        assert_eq!(out.len(), self.d);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (vi, row) in v.iter().zip(self.data.chunks_exact(self.d)) {
            for (o, p) in out.iter_mut().zip(row) {
                *o += p * vi;
            }
        }
    }
}
