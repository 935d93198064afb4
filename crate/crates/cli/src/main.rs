//! `subrgf`: run zeroth-order experiments, lemma checks and trace plots.

mod config;
mod experiment;
mod output;
mod plot;

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use subrgf::data::{generate_multiclass, generate_random_dataset, parse_libsvm, write_libsvm};
use subrgf::par::{configure_workers, Execution};
use subrgf::verify::{run_suite, LemmaCheckReport, Scale};
use subrgf::RngStream;

/// Environment variable holding the worker count.
const WORKERS_ENV: &str = "SUBRGF_WORKERS";

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Numeric(String),
    CheckFailed(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::CheckFailed(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Numeric(m) | Failure::CheckFailed(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "subrgf", version, about = "Zeroth-order random subspace optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Quick,
    Thorough,
}

#[derive(Clone, Copy, ValueEnum)]
enum DataKind {
    Binary,
    Multiclass,
}

#[derive(Subcommand)]
enum Command {
    /// Run the (method, α, seed) grid of an experiment config.
    Run {
        /// Experiment config (TOML).
        config: PathBuf,
        /// Override the output directory of the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run Monte Carlo checks of the probabilistic lemmas.
    Verify {
        /// `all` or one check id.
        #[arg(long, default_value = "all")]
        check: String,
        #[arg(long, value_enum, default_value = "quick")]
        scale: ScaleArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV report path; printed to stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Plot trace CSVs as an SVG line chart.
    Plot {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "iter")]
        x: plot::XAxis,
        #[arg(long, value_enum, default_value = "f-best")]
        y: plot::YAxis,
        #[arg(long)]
        log_y: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a generated dataset in LIBSVM format.
    GenData {
        #[arg(long, value_enum, default_value = "binary")]
        kind: DataKind,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        features: usize,
        #[arg(long, default_value_t = 3)]
        classes: usize,
        /// Label noise standard deviation (binary).
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        /// Fraction of nonzero features (multiclass).
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Parse a LIBSVM file and report its shape or the first error.
    ParseCheck {
        file: PathBuf,
        /// Declared feature count.
        #[arg(long)]
        dimension: Option<usize>,
    },
}

fn parent_dir(path: &std::path::Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn file_name(path: &std::path::Path) -> Result<String, Failure> {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .ok_or_else(|| Failure::Usage(format!("{} is not a file path", path.display())))
}

fn cmd_verify(check: &str, scale: ScaleArg, seed: u64, report: Option<PathBuf>) -> Result<(), Failure> {
    let only = (check != "all").then_some(check);
    let scale = match scale {
        ScaleArg::Quick => Scale::Quick,
        ScaleArg::Thorough => Scale::Thorough,
    };
    let reports = run_suite(only, scale, seed, Execution::Parallel).map_err(|e| match e {
        e if e.is_numeric() => Failure::Numeric(e.to_string()),
        e => Failure::Usage(e.to_string()),
    })?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(LemmaCheckReport::CSV_HEADER).map_err(|e| Failure::Io(e.to_string()))?;
    for r in &reports {
        for rec in r.csv_records() {
            w.write_record(&rec).map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    match &report {
        Some(path) => {
            output::write_atomic(&parent_dir(path), &file_name(path)?, &bytes)
                .map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))?;
        }
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass()).map(|r| r.id).collect();
    for r in &reports {
        eprintln!("{:<20} {}", r.id, if r.pass() { "pass" } else { "FAIL" });
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::CheckFailed(format!("failed checks: {}", failed.join(", "))))
    }
}

fn cmd_plot(traces: &[PathBuf], x: plot::XAxis, y: plot::YAxis, log_y: bool, out: &std::path::Path) -> Result<(), Failure> {
    let series = traces.iter().map(|p| output::read_trace(p)).collect::<Result<Vec<_>, _>>().map_err(Failure::Usage)?;
    let svg = plot::render(&series, x, y, log_y).map_err(Failure::Usage)?;
    output::write_atomic(&parent_dir(out), &file_name(out)?, svg.as_bytes())
        .map_err(|e| Failure::Io(format!("writing {}: {e}", out.display())))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen_data(
    kind: DataKind,
    samples: usize,
    features: usize,
    classes: usize,
    noise: f64,
    density: f64,
    seed: u64,
    out: &std::path::Path,
) -> Result<(), Failure> {
    let rng = RngStream::new(seed, 0);
    let ds = match kind {
        DataKind::Binary => generate_random_dataset(samples, features, noise, None, &rng).map(|g| g.dataset),
        DataKind::Multiclass => generate_multiclass(samples, features, classes, density, &rng),
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let mut bytes = Vec::new();
    write_libsvm(&ds, &mut bytes).map_err(|e| Failure::Io(e.to_string()))?;
    output::write_atomic(&parent_dir(out), &file_name(out)?, &bytes)
        .map_err(|e| Failure::Io(format!("writing {}: {e}", out.display())))?;
    println!("{}", experiment::describe(&ds, out));
    Ok(())
}

fn cmd_parse_check(file: &std::path::Path, dimension: Option<usize>) -> Result<(), Failure> {
    let f = File::open(file).map_err(|e| Failure::Usage(format!("cannot open {}: {e}", file.display())))?;
    let ds = parse_libsvm(BufReader::new(f), dimension).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    println!("{}", experiment::describe(&ds, file));
    Ok(())
}

fn configure_pool() -> Result<(), Failure> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| Failure::Usage(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")))?;
            configure_workers(n).map_err(|e| Failure::Usage(format!("{WORKERS_ENV}: {e}")))
        }
        Err(_) => Ok(()),
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    configure_pool()?;
    match cli.command {
        Command::Run { config, output } => {
            let mut cfg = config::read_config(&config).map_err(Failure::Usage)?;
            if let Some(out) = output {
                cfg.output = out;
            }
            experiment::cmd_run(cfg)
        }
        Command::Verify { check, scale, seed, report } => cmd_verify(&check, scale, seed, report),
        Command::Plot { traces, x, y, log_y, output } => cmd_plot(&traces, x, y, log_y, &output),
        Command::GenData { kind, samples, features, classes, noise, density, seed, output } => {
            cmd_gen_data(kind, samples, features, classes, noise, density, seed, &output)
        }
        Command::ParseCheck { file, dimension } => cmd_parse_check(&file, dimension),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
