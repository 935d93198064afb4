//! Experiment configuration: a flat TOML file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use subrgf::optim::{Budget, Method, ScheduleConfig, TheoryInputs};
use subrgf::problems::Synthetic;
use subrgf::smoothing::{DifferenceScheme, DirectionKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    Rgf,
    Subspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Central,
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionsKind {
    Gaussian,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleMode {
    Constant,
    TheoryGlobal,
    TheoryLocal,
}

fn default_mu() -> f64 {
    1e-8
}
fn default_one() -> usize {
    1
}
fn default_trace_every() -> u64 {
    1
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_scheme() -> SchemeKind {
    SchemeKind::Central
}
fn default_directions() -> DirectionsKind {
    DirectionsKind::Gaussian
}
fn default_schedule() -> ScheduleMode {
    ScheduleMode::Constant
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `softmax-l1`, `robust-logistic` or `synthetic:<name>`.
    pub problem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    /// Declared feature count for a dataset, or `n` for synthetic problems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate_features: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate_classes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate_noise: Option<f64>,
    #[serde(default)]
    pub problem_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_tolerance: Option<f64>,

    pub method: OneOrMany<MethodKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<OneOrMany<usize>>,
    #[serde(default = "default_scheme")]
    pub scheme: SchemeKind,
    #[serde(default = "default_directions")]
    pub directions: DirectionsKind,
    #[serde(default = "default_one")]
    pub batch: usize,

    #[serde(default = "default_schedule")]
    pub schedule: ScheduleMode,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_oracle_calls: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_seconds: Option<f64>,

    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_trace_every")]
    pub trace_every: u64,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemKind {
    SoftmaxL1,
    RobustLogistic,
    Synthetic(String),
}

impl ProblemKind {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "softmax-l1" => Ok(ProblemKind::SoftmaxL1),
            "robust-logistic" => Ok(ProblemKind::RobustLogistic),
            _ => match s.strip_prefix("synthetic:") {
                Some(name) if Synthetic::NAMES.contains(&name) => Ok(ProblemKind::Synthetic(name.to_string())),
                Some(name) => Err(format!(
                    "unknown synthetic problem '{name}' (expected one of {})",
                    Synthetic::NAMES.join(", ")
                )),
                None => Err(format!("unknown problem '{s}' (expected softmax-l1, robust-logistic or synthetic:<name>)")),
            },
        }
    }
}

/// One method variant of the grid; subspace expands over the listed `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodVariant {
    pub method: Method,
}

impl MethodVariant {
    pub fn label(&self) -> String {
        match self.method {
            Method::Rgf { .. } => "rgf".into(),
            Method::Subspace { d } => format!("subspace-d{d}"),
        }
    }
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    if let Some(ds) = &cfg.dataset {
        if ds.is_relative() {
            cfg.dataset = Some(base.join(ds));
        }
    }
    if cfg.output.is_relative() {
        cfg.output = base.join(&cfg.output);
    }
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn problem_kind(&self) -> Result<ProblemKind, String> {
        ProblemKind::parse(&self.problem)
    }

    /// Fills per-problem defaults so that the serialized form is explicit.
    pub fn with_defaults(mut self) -> Result<Self, String> {
        let kind = self.problem_kind()?;
        if self.lambda.is_none() {
            self.lambda = match kind {
                ProblemKind::SoftmaxL1 => Some(1e-6),
                ProblemKind::RobustLogistic => Some(1e-7),
                ProblemKind::Synthetic(_) => None,
            };
        }
        if kind == ProblemKind::RobustLogistic && self.delta.is_none() {
            self.delta = Some(1e-2);
        }
        if let Some(ds) = &self.dataset {
            if let Ok(abs) = std::fs::canonicalize(ds) {
                self.dataset = Some(abs);
            }
        }
        Ok(self)
    }

    pub fn variants(&self) -> Vec<MethodVariant> {
        let ds = self.d.as_ref().map(|d| d.to_vec()).unwrap_or_default();
        let mut out = Vec::new();
        for m in self.method.to_vec() {
            match m {
                MethodKind::Rgf => {
                    let scheme = match self.scheme {
                        SchemeKind::Central => DifferenceScheme::Central,
                        SchemeKind::Forward => DifferenceScheme::Forward,
                    };
                    let directions = match self.directions {
                        DirectionsKind::Gaussian => DirectionKind::Gaussian,
                        DirectionsKind::Sphere => DirectionKind::Sphere,
                    };
                    out.push(MethodVariant { method: Method::Rgf { scheme, directions } });
                }
                MethodKind::Subspace => {
                    out.extend(ds.iter().map(|&d| MethodVariant { method: Method::subspace(d) }));
                }
            }
        }
        out
    }

    pub fn theory_inputs(&self) -> Option<TheoryInputs> {
        match (self.lipschitz, self.r0, self.epsilon) {
            (Some(l), Some(r0), Some(eps)) => Some(TheoryInputs::new(l, r0, eps)),
            _ => None,
        }
    }

    /// Schedule for grid step size `alpha`; theory schedules ignore it.
    /// Call after [`Self::validate`].
    pub fn schedule_for(&self, alpha: Option<f64>) -> ScheduleConfig {
        let theory = || self.theory_inputs().expect("validated theory inputs");
        match self.schedule {
            ScheduleMode::Constant => ScheduleConfig::constant(alpha.expect("constant schedule has a step size"), self.mu),
            ScheduleMode::TheoryGlobal => ScheduleConfig::theory_global(theory()),
            ScheduleMode::TheoryLocal => ScheduleConfig::theory_local(theory()),
        }
    }

    /// Step sizes of the grid; `None` stands for the theory schedule.
    pub fn alpha_cells(&self) -> Vec<Option<f64>> {
        match self.schedule {
            ScheduleMode::Constant => self.alphas.iter().map(|&a| Some(a)).collect(),
            _ => vec![None],
        }
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_iterations: self.max_iterations,
            max_oracle_calls: self.max_oracle_calls,
            max_time: self.max_seconds.map(std::time::Duration::from_secs_f64),
        }
    }

    /// Checks everything that can be checked without touching the file
    /// system.
    pub fn validate(&self) -> Result<(), String> {
        let kind = self.problem_kind()?;
        let methods = self.method.to_vec();
        if methods.is_empty() {
            return Err("method list is empty".into());
        }
        let has_subspace = methods.contains(&MethodKind::Subspace);
        match (&self.d, has_subspace) {
            (None, true) => return Err("d is required when method includes subspace".into()),
            (Some(_), false) => return Err("d is only allowed with method = subspace".into()),
            (Some(d), true) => {
                let d = d.to_vec();
                if d.is_empty() || d.contains(&0) {
                    return Err("d must be a non-empty list of positive integers".into());
                }
            }
            (None, false) => {}
        }
        if self.batch == 0 {
            return Err("batch must be at least 1".into());
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(format!("mu must be positive and finite, got {}", self.mu));
        }
        match self.schedule {
            ScheduleMode::Constant => {
                if self.alphas.is_empty() {
                    return Err("alphas must be a non-empty list".into());
                }
                if let Some(a) = self.alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
                    return Err(format!("step sizes must be positive and finite, got {a}"));
                }
            }
            _ => {
                if !self.alphas.is_empty() {
                    return Err("alphas must be empty with a theory schedule".into());
                }
                if methods.contains(&MethodKind::Rgf) {
                    return Err("theory schedules apply to the subspace method only".into());
                }
                if self.theory_inputs().is_none() {
                    return Err("theory schedules need lipschitz, r0 and epsilon".into());
                }
            }
        }
        if self.seeds.is_empty() {
            return Err("seeds must be a non-empty list".into());
        }
        if self.trace_every == 0 {
            return Err("trace_every must be at least 1".into());
        }
        if self.max_iterations.is_none() && self.max_oracle_calls.is_none() && self.max_seconds.is_none() {
            return Err("set at least one of max_iterations, max_oracle_calls, max_seconds".into());
        }
        if let Some(s) = self.max_seconds {
            if !(s.is_finite() && s > 0.0) {
                return Err(format!("max_seconds must be positive, got {s}"));
            }
        }
        let generated = self.generate_samples.is_some() || self.generate_features.is_some();
        match kind {
            ProblemKind::Synthetic(_) => {
                if self.dataset.is_some() || generated {
                    return Err("synthetic problems take no dataset".into());
                }
                if self.dimension.is_none_or(|n| n == 0) {
                    return Err("synthetic problems need dimension >= 1".into());
                }
            }
            _ => {
                match (self.dataset.is_some(), generated) {
                    (true, true) => return Err("give either dataset or generate_* parameters, not both".into()),
                    (false, false) => return Err("a dataset path or generate_samples/generate_features is required".into()),
                    (false, true) if self.generate_samples.is_none() || self.generate_features.is_none() => {
                        return Err("generated data needs both generate_samples and generate_features".into())
                    }
                    _ => {}
                }
                if let Some(l) = self.lambda {
                    if !(l.is_finite() && l >= 0.0) {
                        return Err(format!("lambda must be non-negative, got {l}"));
                    }
                }
            }
        }
        if kind == ProblemKind::RobustLogistic {
            if let Some(c) = self.generate_classes {
                if c != 2 {
                    return Err("robust-logistic needs two classes".into());
                }
            }
            if let Some(delta) = self.delta {
                if !(delta.is_finite() && delta >= 0.0) {
                    return Err(format!("delta must be non-negative, got {delta}"));
                }
            }
        } else if self.delta.is_some() || self.inner_tolerance.is_some() {
            return Err("delta and inner_tolerance apply to robust-logistic only".into());
        }
        Ok(())
    }
}
