//! The `run` subcommand: grid of (method, α, seed) cells.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use subrgf::data::{generate_multiclass, generate_random_dataset, parse_libsvm, LabeledDataset};
use subrgf::optim::{run, Method, RunConfig, RunTrace};
use subrgf::par::{map_range, Execution};
use subrgf::problems::{InnerSettings, RobustLogisticProblem, SoftmaxL1Problem, Synthetic};
use subrgf::{BlackBoxObjective, DenseVector, Objective, RngStream};

use crate::config::{ExperimentConfig, MethodVariant, ProblemKind, ScheduleMode};
use crate::output::{alpha_tag, trace_csv, trace_file_name, write_atomic};
use crate::Failure;

fn load_dataset(cfg: &ExperimentConfig, classes_default: usize) -> Result<LabeledDataset, Failure> {
    if let Some(path) = &cfg.dataset {
        let file = File::open(path).map_err(|e| Failure::Usage(format!("cannot open dataset {}: {e}", path.display())))?;
        return parse_libsvm(BufReader::new(file), cfg.dimension)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())));
    }
    let (m, p) = (cfg.generate_samples.unwrap_or(0), cfg.generate_features.unwrap_or(0));
    let rng = RngStream::new(cfg.problem_seed, 0);
    let classes = cfg.generate_classes.unwrap_or(classes_default);
    let generated = if classes == 2 {
        generate_random_dataset(m, p, cfg.generate_noise.unwrap_or(0.1), None, &rng).map(|g| g.dataset)
    } else {
        generate_multiclass(m, p, classes, 1.0, &rng)
    };
    generated.map_err(|e| Failure::Usage(e.to_string()))
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<Box<dyn Objective>, Failure> {
    let kind = cfg.problem_kind().map_err(Failure::Usage)?;
    let usage = |e: subrgf::Error| Failure::Usage(e.to_string());
    Ok(match kind {
        ProblemKind::SoftmaxL1 => {
            let ds = load_dataset(cfg, 3)?;
            let labels: Vec<usize> = ds.class_ids().into_iter().map(|k| k - 1).collect();
            let classes = ds.classes();
            Box::new(SoftmaxL1Problem::new(ds.features, labels, classes, cfg.lambda.unwrap_or(1e-6)).map_err(usage)?)
        }
        ProblemKind::RobustLogistic => {
            let ds = load_dataset(cfg, 2)?;
            let labels = ds
                .signed_labels()
                .ok_or_else(|| Failure::Usage(format!("robust-logistic needs exactly two classes, found {}", ds.classes())))?;
            let mut inner = InnerSettings::default();
            if let Some(tol) = cfg.inner_tolerance {
                inner.tolerance = tol;
            }
            Box::new(
                RobustLogisticProblem::new(ds.features, &labels, cfg.lambda.unwrap_or(1e-7), cfg.delta.unwrap_or(1e-2), inner)
                    .map_err(usage)?,
            )
        }
        ProblemKind::Synthetic(name) => {
            let mut rng = RngStream::new(cfg.problem_seed, 0);
            Box::new(Synthetic::random(&name, cfg.dimension.unwrap_or(0), &mut rng).map_err(usage)?)
        }
    })
}

struct Cell {
    variant: MethodVariant,
    alpha: Option<f64>,
    seed: u64,
}

fn run_config(cfg: &ExperimentConfig, cell: &Cell) -> RunConfig {
    let mut rc = RunConfig::new(cell.variant.method, cfg.schedule_for(cell.alpha), cfg.budget());
    rc.batch = cfg.batch;
    rc.trace_every = cfg.trace_every;
    rc.exec = Execution::Parallel;
    rc
}

fn schedule_name(mode: ScheduleMode) -> &'static str {
    match mode {
        ScheduleMode::Constant => "constant",
        ScheduleMode::TheoryGlobal => "theory-global",
        ScheduleMode::TheoryLocal => "theory-local",
    }
}

struct CellOutcome {
    trace: Result<RunTrace, subrgf::Error>,
    file: String,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Validates, loads the problem, then writes traces, `summary.csv` and
/// `effective_config.toml` into the output directory.
pub fn cmd_run(cfg: ExperimentConfig) -> Result<(), Failure> {
    cfg.validate().map_err(Failure::Usage)?;
    let cfg = cfg.with_defaults().map_err(Failure::Usage)?;
    let problem = build_problem(&cfg)?;
    let n = problem.dim();

    let cells: Vec<Cell> = cfg
        .variants()
        .into_iter()
        .flat_map(|variant| {
            let cfg = &cfg;
            cfg.alpha_cells()
                .into_iter()
                .flat_map(move |alpha| cfg.seeds.iter().map(move |&seed| Cell { variant, alpha, seed }))
        })
        .collect();
    for cell in &cells {
        let rc = run_config(&cfg, cell);
        rc.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        let d = match cell.variant.method {
            Method::Subspace { d } if d > n => {
                return Err(Failure::Usage(format!("subspace dimension d={d} exceeds the problem dimension {n}")))
            }
            Method::Subspace { d } => Some(d),
            Method::Rgf { .. } => None,
        };
        rc.schedule.resolve(n, d).map_err(|e| Failure::Usage(e.to_string()))?;
    }

    let out_dir = cfg.output.clone();
    std::fs::create_dir_all(&out_dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let effective = toml::to_string(&cfg).map_err(|e| Failure::Usage(e.to_string()))?;
    write_atomic(&out_dir, "effective_config.toml", effective.as_bytes())
        .map_err(|e| Failure::Io(format!("writing effective_config.toml: {e}")))?;

    let sched = schedule_name(cfg.schedule);
    let x0 = DenseVector::zeros(n);
    let outcomes: Vec<CellOutcome> = map_range(Execution::Parallel, cells.len(), |i| {
        let cell = &cells[i];
        let obj = BlackBoxObjective::new(&*problem);
        let label = cell.variant.label();
        let file = trace_file_name(&label, &alpha_tag(cell.alpha, sched), cell.seed);
        let trace = run(&obj, &x0, &run_config(&cfg, cell), &RngStream::new(cell.seed, 0));
        if let Ok(t) = &trace {
            if let Err(e) = write_atomic(&out_dir, &file, &trace_csv(t, &label)) {
                return CellOutcome { trace: Err(subrgf::Error::Config(format!("writing {file}: {e}"))), file };
            }
        }
        CellOutcome { trace, file }
    });

    // best α per method: smallest median best value over seeds
    let mut best_alpha = std::collections::HashMap::new();
    for variant in cfg.variants() {
        let label = variant.label();
        let mut choice: Option<(f64, Option<f64>)> = None;
        for alpha in cfg.alpha_cells() {
            let bests: Vec<f64> = cells
                .iter()
                .zip(&outcomes)
                .filter(|(c, _)| c.variant.label() == label && c.alpha == alpha)
                .map(|(_, o)| o.trace.as_ref().map(|t| t.best_value).unwrap_or(f64::INFINITY))
                .collect();
            let m = median(bests);
            if choice.is_none_or(|(best, _)| m < best) {
                choice = Some((m, alpha));
            }
        }
        if let Some((m, alpha)) = choice {
            println!("{label}: best alpha {} (median best f = {m})", alpha_tag(alpha, sched));
            best_alpha.insert(label, alpha);
        }
    }

    let mut summary = csv::Writer::from_writer(Vec::new());
    let header = [
        "method", "alpha", "seed", "iterations", "oracle_calls", "final_f", "best_f", "elapsed_ns", "termination",
        "best_alpha", "trace",
    ];
    summary.write_record(header).map_err(|e| Failure::Io(e.to_string()))?;
    let mut numeric = Vec::new();
    let mut other = Vec::new();
    for (cell, outcome) in cells.iter().zip(&outcomes) {
        let label = cell.variant.label();
        let chosen = best_alpha.get(&label) == Some(&cell.alpha);
        let common = [label.clone(), alpha_tag(cell.alpha, sched), cell.seed.to_string()];
        let rest = match &outcome.trace {
            Ok(t) => [
                t.iterations.to_string(),
                t.oracle_calls.to_string(),
                t.last_value.to_string(),
                t.best_value.to_string(),
                t.records.last().map_or(0, |r| r.elapsed_ns).to_string(),
                t.termination.as_str().to_string(),
                chosen.to_string(),
                outcome.file.clone(),
            ],
            Err(e) => {
                let msg = format!("{label} alpha={} seed={}: {e}", alpha_tag(cell.alpha, sched), cell.seed);
                if e.is_numeric() {
                    numeric.push(msg);
                } else {
                    other.push(msg);
                }
                let status = if e.is_numeric() { "numeric-failure" } else { "failed" };
                [String::new(), String::new(), String::new(), String::new(), String::new(), status.into(), chosen.to_string(), String::new()]
            }
        };
        summary.write_record(common.iter().chain(rest.iter())).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let bytes = summary.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    write_atomic(&out_dir, "summary.csv", &bytes).map_err(|e| Failure::Io(format!("writing summary.csv: {e}")))?;

    if let Some(msg) = other.first() {
        return Err(Failure::Io(msg.clone()));
    }
    if !numeric.is_empty() {
        return Err(Failure::Numeric(numeric.join("\n")));
    }
    println!("wrote {} traces to {}", cells.len(), out_dir.display());
    Ok(())
}

/// Used by `parse-check` and `gen-data`.
pub fn describe(ds: &LabeledDataset, path: &Path) -> String {
    let mapping: Vec<String> = ds.class_mapping().iter().map(|(k, v)| format!("{v}->{k}")).collect();
    format!(
        "{}: {} samples, {} features, {} nonzeros, {} classes ({})",
        path.display(),
        ds.samples(),
        ds.dim(),
        ds.features.nnz(),
        ds.classes(),
        mapping.join(", ")
    )
}
