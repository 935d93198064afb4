//! Streaming moments and a chunked Monte Carlo driver.

use crate::par::{self, Execution};
use crate::rng::RngStream;

/// Running mean/variance (Welford), mergeable across chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

/// Componentwise [`Moments`] for vector-valued samples.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorMoments {
    parts: Vec<Moments>,
}

impl VectorMoments {
    pub fn new(dim: usize) -> Self {
        VectorMoments { parts: vec![Moments::default(); dim] }
    }

    pub fn push(&mut self, x: &[f64]) {
        for (m, &v) in self.parts.iter_mut().zip(x) {
            m.push(v);
        }
    }

    pub fn merge(&mut self, other: &VectorMoments) {
        for (a, b) in self.parts.iter_mut().zip(&other.parts) {
            a.merge(b);
        }
    }

    pub fn dim(&self) -> usize {
        self.parts.len()
    }

    pub fn component(&self, i: usize) -> &Moments {
        &self.parts[i]
    }

    pub fn means(&self) -> Vec<f64> {
        self.parts.iter().map(Moments::mean).collect()
    }

    pub fn std_errors(&self) -> Vec<f64> {
        self.parts.iter().map(Moments::std_error).collect()
    }
}

/// Empirical frequency of an event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency {
    pub hits: u64,
    pub trials: u64,
}

impl Frequency {
    pub fn rate(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    pub fn std_error(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

const CHUNK: usize = 256;

/// Runs `trials` independent draws. Trial `i` always receives
/// `stream.substream(i)`, and chunk results are merged in a fixed order, so
/// the outcome does not depend on the execution policy or thread count.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarlo {
    pub trials: usize,
    pub exec: Execution,
}

impl MonteCarlo {
    pub fn new(trials: usize) -> Self {
        MonteCarlo { trials, exec: Execution::default() }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    fn chunks(&self) -> usize {
        self.trials.div_ceil(CHUNK)
    }

    fn chunk_range(&self, c: usize) -> std::ops::Range<usize> {
        c * CHUNK..((c + 1) * CHUNK).min(self.trials)
    }

    pub fn try_scalar<E, F>(&self, stream: &RngStream, f: F) -> Result<Moments, E>
    where
        E: Send,
        F: Fn(&mut RngStream) -> Result<f64, E> + Sync + Send,
    {
        let parts = par::try_map_range(self.exec, self.chunks(), |c| {
            let mut m = Moments::default();
            for t in self.chunk_range(c) {
                m.push(f(&mut stream.substream(t as u64))?);
            }
            Ok(m)
        })?;
        let mut total = Moments::default();
        parts.iter().for_each(|p| total.merge(p));
        Ok(total)
    }

    pub fn scalar<F>(&self, stream: &RngStream, f: F) -> Moments
    where
        F: Fn(&mut RngStream) -> f64 + Sync + Send,
    {
        self.try_scalar::<std::convert::Infallible, _>(stream, |r| Ok(f(r)))
            .unwrap_or_else(|e| match e {})
    }

    pub fn try_vector<E, F>(&self, stream: &RngStream, dim: usize, f: F) -> Result<VectorMoments, E>
    where
        E: Send,
        F: Fn(&mut RngStream, &mut [f64]) -> Result<(), E> + Sync + Send,
    {
        let parts = par::try_map_range(self.exec, self.chunks(), |c| {
            let mut m = VectorMoments::new(dim);
            let mut buf = vec![0.0; dim];
            for t in self.chunk_range(c) {
                f(&mut stream.substream(t as u64), &mut buf)?;
                m.push(&buf);
            }
            Ok(m)
        })?;
        let mut total = VectorMoments::new(dim);
        parts.iter().for_each(|p| total.merge(p));
        Ok(total)
    }

    pub fn vector<F>(&self, stream: &RngStream, dim: usize, f: F) -> VectorMoments
    where
        F: Fn(&mut RngStream, &mut [f64]) + Sync + Send,
    {
        self.try_vector::<std::convert::Infallible, _>(stream, dim, |r, o| {
            f(r, o);
            Ok(())
        })
        .unwrap_or_else(|e| match e {})
    }

    pub fn frequency<F>(&self, stream: &RngStream, event: F) -> Frequency
    where
        F: Fn(&mut RngStream) -> bool + Sync + Send,
    {
        let m = self.scalar(stream, |r| if event(r) { 1.0 } else { 0.0 });
        Frequency { hits: (m.mean() * m.count() as f64).round() as u64, trials: m.count() }
    }

    /// Collects one value per trial, in trial order.
    pub fn collect<T, F>(&self, stream: &RngStream, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut RngStream) -> T + Sync + Send,
    {
        par::map_range(self.exec, self.trials, |t| f(&mut stream.substream(t as u64)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let whole: Moments = xs.iter().copied().collect();
        let mut a: Moments = xs[..333].iter().copied().collect();
        let b: Moments = xs[333..].iter().copied().collect();
        a.merge(&b);
        assert!((a.mean() - whole.mean()).abs() < 1e-12);
        assert!((a.variance() - whole.variance()).abs() < 1e-9);
    }

    #[test]
    fn execution_policy_does_not_change_results() {
        let s = RngStream::new(11, 0);
        let f = |r: &mut RngStream| r.standard_normal().powi(2);
        let a = MonteCarlo::new(3000).with_execution(Execution::Sequential).scalar(&s, f);
        let b = MonteCarlo::new(3000).with_execution(Execution::Parallel).scalar(&s, f);
        assert_eq!(a, b);
    }

    #[test]
    fn normal_square_has_unit_mean() {
        let m = MonteCarlo::new(20_000).scalar(&RngStream::new(2, 9), |r| r.standard_normal().powi(2));
        assert!((m.mean() - 1.0).abs() < 5.0 * m.std_error());
    }
}
