//! Monte Carlo checks of the probabilistic facts the methods rely on.
//!
//! Each check returns a [`LemmaCheckReport`] with one [`CheckEntry`] per
//! statistic. An entry passes when its statistic lies within
//! `margin_se` standard errors of the claimed bounds.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, min_singular_value};
use crate::optim::SubspaceSketch;
use crate::oracle::{BlackBoxObjective, Objective};
use crate::par::Execution;
use crate::rng::RngStream;
use crate::smoothing::{DirectionSampler, SmoothingParams};
use crate::stats::{Frequency, Moments, MonteCarlo};
use crate::vector::{dot, norm};

pub const SE_MARGIN: f64 = 5.0;
pub const FREQ_MARGIN: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckEntry {
    pub label: String,
    pub statistic: f64,
    pub std_error: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub margin_se: f64,
    pub pass: bool,
}

impl CheckEntry {
    fn new(label: impl Into<String>, statistic: f64, std_error: f64, lower: Option<f64>, upper: Option<f64>, margin_se: f64) -> Self {
        let slack = margin_se * std_error;
        let pass = statistic.is_finite()
            && lower.is_none_or(|lo| statistic >= lo - slack)
            && upper.is_none_or(|hi| statistic <= hi + slack);
        CheckEntry { label: label.into(), statistic, std_error, lower, upper, margin_se, pass }
    }

    /// Entry for a claimed equality.
    fn equal(label: impl Into<String>, statistic: f64, std_error: f64, claimed: f64, margin_se: f64) -> Self {
        Self::new(label, statistic, std_error, Some(claimed), Some(claimed), margin_se)
    }

    /// Entry for `statistic < bound` with a strict inequality at zero slack.
    fn strictly_below(label: impl Into<String>, freq: &Frequency, bound: f64, margin_se: f64) -> Self {
        let (stat, se) = (freq.rate(), freq.std_error());
        let pass = stat < bound + margin_se * se;
        CheckEntry { label: label.into(), statistic: stat, std_error: se, lower: None, upper: Some(bound), margin_se, pass }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheckReport {
    pub id: &'static str,
    pub samples: u64,
    pub entries: Vec<CheckEntry>,
}

impl LemmaCheckReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub const CSV_HEADER: [&'static str; 9] =
        ["id", "label", "samples", "statistic", "std_error", "lower", "upper", "margin_se", "pass"];

    /// One CSV record per entry, matching [`Self::CSV_HEADER`].
    pub fn csv_records(&self) -> Vec<Vec<String>> {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        self.entries
            .iter()
            .map(|e| {
                vec![
                    self.id.to_string(),
                    e.label.clone(),
                    self.samples.to_string(),
                    format!("{:e}", e.statistic),
                    format!("{:e}", e.std_error),
                    opt(e.lower),
                    opt(e.upper),
                    e.margin_se.to_string(),
                    e.pass.to_string(),
                ]
            })
            .collect()
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::Config("a check needs at least 2 samples".into()));
    }
    Ok(())
}

/// `E‖u‖^p` for Gaussian `u ∈ R^d` against `d^{p/2}` (upper bound for
/// `p ≤ 2`) and `[d^{p/2}, (d+p)^{p/2}]` for `p ≥ 2`.
pub fn check_moment_bounds(d: usize, powers: &[f64], samples: usize, exec: Execution, rng: &RngStream) -> Result<LemmaCheckReport> {
    check_samples(samples)?;
    if d == 0 || powers.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::Config("moment check needs d >= 1 and non-negative powers".into()));
    }
    let sampler = DirectionSampler::gaussian(d);
    let stats = MonteCarlo::new(samples).with_execution(exec).vector(rng, powers.len(), |r, out| {
        let r2 = norm(&sampler.sample(r));
        for (o, p) in out.iter_mut().zip(powers) {
            *o = r2.powf(*p);
        }
    });
    let df = d as f64;
    let entries = powers
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let m = stats.component(i);
            let base = df.powf(p / 2.0);
            let label = format!("d={d} p={p}");
            if p <= 2.0 {
                let lower = if p == 0.0 { Some(1.0) } else { None };
                CheckEntry::new(label, m.mean(), m.std_error(), lower, Some(base), SE_MARGIN)
            } else {
                CheckEntry::new(label, m.mean(), m.std_error(), Some(base), Some((df + p).powf(p / 2.0)), SE_MARGIN)
            }
        })
        .collect();
    Ok(LemmaCheckReport { id: "moments", samples: samples as u64, entries })
}

/// `E[uᵀAu] = tr A` and `E[(uᵀAu)²] = (tr A)² + 2 tr A²`.
pub fn check_trace_identities(a: &DMatrix<f64>, samples: usize, exec: Execution, rng: &RngStream) -> Result<LemmaCheckReport> {
    check_samples(samples)?;
    if !a.is_square() || (a - a.transpose()).amax() > 1e-12 * a.amax().max(1.0) {
        return Err(Error::contract("trace identities need a symmetric matrix"));
    }
    let d = a.nrows();
    let stats = MonteCarlo::new(samples).with_execution(exec).vector(rng, 2, |r, out| {
        let u = nalgebra::DVector::from_vec(r.normal_vec(d));
        let q = u.dot(&(a * &u));
        out[0] = q;
        out[1] = q * q;
    });
    let tr = a.trace();
    let tr2 = (a * a).trace();
    let (m1, m2) = (stats.component(0), stats.component(1));
    let entries = vec![
        CheckEntry::equal("E[uᵀAu] = tr A", m1.mean(), m1.std_error(), tr, SE_MARGIN),
        CheckEntry::equal("E[(uᵀAu)²] = (tr A)² + 2 tr A²", m2.mean(), m2.std_error(), tr * tr + 2.0 * tr2, SE_MARGIN),
    ];
    Ok(LemmaCheckReport { id: "trace", samples: samples as u64, entries })
}

/// Frequency of `(1−ε)‖x‖² ≤ ‖Pᵀx‖²/d ≤ (1+ε)‖x‖²` for Gaussian `P ∈ R^{n×d}`.
pub fn jl_frequency(x: &[f64], d: usize, epsilon: f64, trials: usize, exec: Execution, rng: &RngStream) -> Frequency {
    let xx = dot(x, x);
    MonteCarlo::new(trials).with_execution(exec).frequency(rng, |r| {
        let mut s = 0.0;
        for _ in 0..d {
            let c: f64 = x.iter().map(|xi| xi * r.standard_normal()).sum();
            s += c * c;
        }
        let s = s / d as f64;
        (1.0 - epsilon) * xx <= s && s <= (1.0 + epsilon) * xx
    })
}

/// Largest `ĉ` with `fail_j ≤ 2 exp(−ĉ s_j)` on every rung.
/// Zero observed failures are replaced by half an event.
fn fit_tail_constant(points: &[(f64, Frequency)]) -> f64 {
    points
        .iter()
        .map(|(scale, f)| {
            let fail = ((f.trials - f.hits) as f64).max(0.5) / f.trials as f64;
            (2.0 / fail).ln() / scale
        })
        .fold(f64::INFINITY, f64::min)
}

/// Norm preservation under a Gaussian sketch. The tail constant is fitted on
/// the ladder `d/4, d/2, d`; each rung must satisfy
/// `freq ≥ 1 − 2 exp(−ĉ ε² d_j)` within 3 standard errors, and the success
/// frequency must not drop as `d` grows.
pub fn check_jl(x: &[f64], d: usize, epsilon: f64, trials: usize, exec: Execution, rng: &RngStream) -> Result<LemmaCheckReport> {
    check_samples(trials)?;
    if d == 0 || !(epsilon > 0.0 && epsilon < 1.0) || x.is_empty() {
        return Err(Error::Config("JL check needs d >= 1, 0 < ε < 1 and non-empty x".into()));
    }
    let mut ladder: Vec<usize> = vec![(d / 4).max(1), (d / 2).max(1), d];
    ladder.dedup();
    let points: Vec<(f64, Frequency)> = ladder
        .iter()
        .enumerate()
        .map(|(j, &dj)| (epsilon * epsilon * dj as f64, jl_frequency(x, dj, epsilon, trials, exec, &rng.substream(j as u64))))
        .collect();
    let c_hat = fit_tail_constant(&points);
    let mut entries: Vec<CheckEntry> = ladder
        .iter()
        .zip(&points)
        .map(|(dj, (scale, f))| {
            let bound = 1.0 - 2.0 * (-c_hat * scale).exp();
            CheckEntry::new(format!("d={dj} eps={epsilon}"), f.rate(), f.std_error(), Some(bound), None, FREQ_MARGIN)
        })
        .collect();
    for (w, pair) in ladder.windows(2).zip(points.windows(2)) {
        let (a, b) = (&pair[0].1, &pair[1].1);
        let se = (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
        entries.push(CheckEntry::new(
            format!("freq(d={}) − freq(d={})", w[1], w[0]),
            b.rate() - a.rate(),
            se,
            Some(0.0),
            None,
            FREQ_MARGIN,
        ));
    }
    entries.push(CheckEntry::new("fitted constant", c_hat, 0.0, Some(f64::MIN_POSITIVE), None, 0.0));
    Ok(LemmaCheckReport { id: "jl", samples: trials as u64, entries })
}

/// `E‖PPᵀx‖²` against the exact value `d(n+d+1)‖x‖²`, the intermediate
/// bound `((d+4)² + d(n−1))‖x‖²` and the final bound `2(n+4)(d+4)‖x‖²`.
pub fn check_ppt_bound(x: &[f64], d: usize, samples: usize, exec: Execution, rng: &RngStream) -> Result<LemmaCheckReport> {
    check_samples(samples)?;
    let n = x.len();
    if d == 0 || d > n {
        return Err(Error::Config("PPᵀ check needs 1 <= d <= n".into()));
    }
    let stats = MonteCarlo::new(samples).with_execution(exec).scalar(rng, |r| {
        let p = SubspaceSketch::gaussian(n, d, r).expect("valid shape");
        let mut y = vec![0.0; d];
        p.pullback(x, &mut y);
        let mut z = vec![0.0; n];
        p.apply(&y, &mut z);
        dot(&z, &z)
    });
    let (nf, df, xx) = (n as f64, d as f64, dot(x, x));
    let entries = vec![
        CheckEntry::equal("exact d(n+d+1)|x|^2", stats.mean(), stats.std_error(), df * (nf + df + 1.0) * xx, SE_MARGIN),
        CheckEntry::new("((d+4)^2+d(n-1))|x|^2", stats.mean(), stats.std_error(), None, Some(((df + 4.0).powi(2) + df * (nf - 1.0)) * xx), SE_MARGIN),
        CheckEntry::new("2(n+4)(d+4)|x|^2", stats.mean(), stats.std_error(), None, Some(2.0 * (nf + 4.0) * (df + 4.0) * xx), SE_MARGIN),
    ];
    Ok(LemmaCheckReport { id: "ppt", samples: samples as u64, entries })
}

/// `σ_min(P/√n)` for Gaussian `P ∈ R^{n×d}`.
pub fn scaled_min_singular(n: usize, d: usize, r: &mut RngStream) -> f64 {
    let scale = 1.0 / (n as f64).sqrt();
    let data: Vec<f64> = r.normal_vec(n * d).into_iter().map(|v| v * scale).collect();
    min_singular_value(&DMatrix::from_row_slice(n, d, &data)).expect("tall matrix")
}

/// `P[σ_min(P/√n) ≤ 1 − √(d/n) − t] < exp(−n t²/2)`.
pub fn check_min_singular(n: usize, d: usize, t: f64, trials: usize, exec: Execution, rng: &RngStream) -> Result<LemmaCheckReport> {
    check_samples(trials)?;
    if d == 0 || d > n || !(t >= 0.0) {
        return Err(Error::Config("singular value check needs 1 <= d <= n and t >= 0".into()));
    }
    let threshold = 1.0 - (d as f64 / n as f64).sqrt() - t;
    let freq = MonteCarlo::new(trials).with_execution(exec).frequency(rng, |r| scaled_min_singular(n, d, r) <= threshold);
    let bound = (-(n as f64) * t * t / 2.0).exp();
    let entries = vec![CheckEntry::strictly_below(format!("n={n} d={d} t={t}"), &freq, bound, FREQ_MARGIN)];
    Ok(LemmaCheckReport { id: "min-singular", samples: trials as u64, entries })
}

/// Two independent estimators of each side of
/// `E_P h(μu) = f_σ(x)` and `E_P[(h(μu) − h(−μu))/(2μ) P u] = (‖u‖²/√n) ∇f_σ(x)`,
/// where `h(v) = f(x + P v/√n)` and `σ = μ‖u‖/√n`.
pub fn check_subspace_smoothing<O: Objective>(
    f: &BlackBoxObjective<O>,
    x: &[f64],
    mu: f64,
    u: &[f64],
    samples: usize,
    exec: Execution,
    rng: &RngStream,
) -> Result<LemmaCheckReport> {
    check_samples(samples)?;
    let (n, d) = (x.len(), u.len());
    if d == 0 || d > n {
        return Err(Error::Config("subspace smoothing check needs 1 <= d <= n".into()));
    }
    let mc = MonteCarlo::new(samples).with_execution(exec);
    let root_n = (n as f64).sqrt();
    let sigma = mu * norm(u) / root_n;
    let factor = dot(u, u) / root_n;
    let plus: Vec<f64> = u.iter().map(|v| mu * v).collect();
    let minus: Vec<f64> = u.iter().map(|v| -mu * v).collect();

    // left sides: draws of P
    let lhs = mc.try_vector(&rng.substream(0), n + 1, |r, out| {
        let p = SubspaceSketch::gaussian(n, d, r)?;
        let hp = f.eval_sketched(x, &p, &plus)?;
        let hm = f.eval_sketched(x, &p, &minus)?;
        let q = (hp - hm) / (2.0 * mu);
        out[0] = hp;
        p.apply(u, &mut out[1..]);
        out[1..].iter_mut().for_each(|v| *v *= q);
        Ok::<_, Error>(())
    })?;
    // right sides: Gaussian smoothing of f in the full space at radius σ
    let params = SmoothingParams::central(sigma)?;
    let sampler = DirectionSampler::gaussian(n);
    let rhs = mc.try_vector(&rng.substream(1), n + 1, |r, out| {
        let v = sampler.sample(r);
        let shifted: Vec<f64> = x.iter().zip(v.iter()).map(|(a, b)| a + sigma * b).collect();
        out[0] = f.eval(&shifted)?;
        let q = crate::smoothing::difference_quotient(f, x, &v, &params)?;
        for (o, vi) in out[1..].iter_mut().zip(v.iter()) {
            *o = factor * q * vi;
        }
        Ok::<_, Error>(())
    })?;

    let entries = (0..=n)
        .map(|i| {
            let (a, b) = (lhs.component(i), rhs.component(i));
            let se = (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
            let label = if i == 0 { "E h(mu u) - f_sigma(x)".to_string() } else { format!("direction[{}]", i - 1) };
            CheckEntry::equal(label, a.mean() - b.mean(), se, 0.0, SE_MARGIN)
        })
        .collect();
    Ok(LemmaCheckReport { id: "subspace-smoothing", samples: samples as u64, entries })
}

/// `f(x) ≤ f_μ(x) ≤ f(x) + μ L √n` for `f = L‖·‖₂` at the given points.
pub fn check_sandwich(points: &[Vec<f64>], lipschitz: f64, mu: f64, samples: usize, exec: Execution, rng: &RngStream) -> Result<LemmaCheckReport> {
    check_samples(samples)?;
    let n = points.first().map_or(0, |p| p.len());
    if n == 0 {
        return Err(Error::Config("sandwich check needs points".into()));
    }
    let f = BlackBoxObjective::from_fn(n, move |x: &[f64]| lipschitz * norm(x));
    let params = SmoothingParams::central(mu)?;
    let sampler = DirectionSampler::gaussian(n);
    let mc = MonteCarlo::new(samples).with_execution(exec);
    let mut entries = Vec::with_capacity(points.len());
    for (i, x) in points.iter().enumerate() {
        let fx = f.diagnostic(x)?;
        let est: Moments = crate::smoothing::smoothed_value_estimate(&f, x, &params, &sampler, mc, &rng.substream(i as u64))?;
        let upper = fx + mu * lipschitz * (n as f64).sqrt();
        entries.push(CheckEntry::new(format!("point {i} mu={mu}"), est.mean(), est.std_error(), Some(fx), Some(upper), SE_MARGIN));
    }
    Ok(LemmaCheckReport { id: "sandwich", samples: samples as u64, entries })
}

/// `λ_min(AAᵀ)` for `A` stacking `θᵀ/‖θ‖` over `Pᵀ/√n`, computed from the
/// Gram matrix directly.
pub fn lemma61_min_eigenvalue(theta: &[f64], d: usize, r: &mut RngStream) -> f64 {
    let n = theta.len();
    let p = SubspaceSketch::gaussian(n, d, r).expect("valid shape");
    crate::problems::gram_matrix(theta, &p).and_then(|g| min_eigenvalue(&g)).expect("well-formed Gram matrix")
}

/// Lower bound `1 − 2(3+ε)√(d/n) + 4d/n` on `λ_min(AAᵀ)`.
pub fn lemma61_bound(n: usize, d: usize, epsilon: f64) -> f64 {
    let beta = d as f64 / n as f64;
    1.0 - 2.0 * (3.0 + epsilon) * beta.sqrt() + 4.0 * beta
}

/// Frequency of `λ_min(AAᵀ) ≥ 1 − 2(3+ε)√(d/n) + 4d/n`, against
/// `1 − 2exp(−ĉε²d) − exp(−d/2)` with `ĉ` fitted from the norm-preservation
/// failure rate at the same `(d, ε)`.
pub fn check_lemma61(n: usize, d: usize, epsilon: f64, trials: usize, exec: Execution, rng: &RngStream) -> Result<LemmaCheckReport> {
    check_samples(trials)?;
    if d == 0 || d + 1 >= n || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config("Gram eigenvalue check needs 1 <= d, d + 1 < n and 0 < ε < 1".into()));
    }
    let theta = rng.substream(0).normal_vec(n);
    let bound = lemma61_bound(n, d, epsilon);
    let mc = MonteCarlo::new(trials).with_execution(exec);
    let freq = mc.frequency(&rng.substream(1), |r| lemma61_min_eigenvalue(&theta, d, r) >= bound);
    let jl = jl_frequency(&theta, d, epsilon, trials, exec, &rng.substream(2));
    let c_hat = fit_tail_constant(&[(epsilon * epsilon * d as f64, jl)]);
    let claimed = 1.0 - 2.0 * (-c_hat * epsilon * epsilon * d as f64).exp() - (-(d as f64) / 2.0).exp();
    let entries = vec![
        CheckEntry::new(format!("n={n} d={d} eps={epsilon} bound={bound:.4}"), freq.rate(), freq.std_error(), Some(claimed), None, FREQ_MARGIN),
    ];
    Ok(LemmaCheckReport { id: "lemma61", samples: trials as u64, entries })
}

/// Identifiers accepted by [`run_suite`].
pub const CHECK_IDS: [&str; 8] = ["moments", "trace", "jl", "ppt", "min-singular", "subspace-smoothing", "lemma61", "sandwich"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Thorough,
}

impl Scale {
    pub fn samples(self) -> usize {
        match self {
            Scale::Quick => 10_000,
            Scale::Thorough => 100_000,
        }
    }
}

/// Runs the checks selected by `only` (all when `None`) at `scale`.
pub fn run_suite(only: Option<&str>, scale: Scale, seed: u64, exec: Execution) -> Result<Vec<LemmaCheckReport>> {
    if let Some(id) = only {
        if !CHECK_IDS.contains(&id) {
            return Err(Error::Config(format!("unknown check '{id}' (expected one of {})", CHECK_IDS.join(", "))));
        }
    }
    let samples = scale.samples();
    let wanted = |id: &str| only.is_none_or(|o| o == id);
    let stream = |k: u64| RngStream::new(seed, k);
    let mut reports = Vec::new();
    if wanted("moments") {
        for (k, d) in [10usize, 100].into_iter().enumerate() {
            reports.push(check_moment_bounds(d, &[0.0, 0.5, 1.0, 2.0, 3.0, 4.0], samples, exec, &stream(k as u64))?);
        }
    }
    if wanted("trace") {
        let mut r = stream(10);
        let g = DMatrix::from_vec(10, 10, r.normal_vec(100));
        let a = (&g + g.transpose()) * 0.5;
        reports.push(check_trace_identities(&a, samples, exec, &stream(11))?);
        reports.push(check_trace_identities(&DMatrix::identity(10, 10), samples, exec, &stream(12))?);
    }
    if wanted("jl") {
        let x = stream(20).normal_vec(20);
        reports.push(check_jl(&x, 100, 0.3, samples, exec, &stream(21))?);
    }
    if wanted("ppt") {
        let mut x = stream(30).normal_vec(100);
        let s = 1.0 / norm(&x);
        x.iter_mut().for_each(|v| *v *= s);
        reports.push(check_ppt_bound(&x, 10, samples, exec, &stream(31))?);
    }
    if wanted("min-singular") {
        reports.push(check_min_singular(200, 20, 0.2, samples, exec, &stream(40))?);
    }
    if wanted("subspace-smoothing") {
        let n = 20;
        let x = stream(50).normal_vec(n);
        let u = stream(51).normal_vec(5);
        let f = BlackBoxObjective::from_fn(n, |x: &[f64]| x.iter().map(|v| v.abs()).sum());
        reports.push(check_subspace_smoothing(&f, &x, 0.5, &u, samples, exec, &stream(52))?);
    }
    if wanted("lemma61") {
        reports.push(check_lemma61(1000, 10, 0.5, samples, exec, &stream(60))?);
    }
    if wanted("sandwich") {
        let n = 50;
        let points: Vec<Vec<f64>> = (0..10).map(|i| stream(70).substream(i).normal_vec(n)).collect();
        for (k, mu) in [1e-2, 1e-4].into_iter().enumerate() {
            reports.push(check_sandwich(&points, 1.0, mu, samples, exec, &stream(71 + k as u64))?);
        }
    }
    Ok(reports)
}
