//! Atomic file output and the versioned trace schema.

use std::io::Write;
use std::path::{Path, PathBuf};

use subrgf::optim::RunTrace;

pub const TRACE_SCHEMA: &str = "# subrgf-trace v1";
pub const TRACE_COLUMNS: [&str; 6] = ["iter", "oracle_calls", "f", "f_best", "elapsed_ns", "step_norm"];

/// Writes `bytes` to `dir/name` through a temporary file in `dir` and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> std::io::Result<PathBuf> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| e.error)?;
    Ok(target)
}

/// `1e-3`, `0.5` → `5e-1`; stable and file-name safe.
pub fn alpha_tag(alpha: Option<f64>, schedule: &str) -> String {
    match alpha {
        Some(a) => format!("{a:e}"),
        None => schedule.to_string(),
    }
}

pub fn trace_file_name(method: &str, alpha_tag: &str, seed: u64) -> String {
    format!("trace_{method}_a{alpha_tag}_s{seed}.csv")
}

/// Trace CSV: schema line, one `# key=value` metadata line, header, rows.
pub fn trace_csv(trace: &RunTrace, label: &str) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(out, "{TRACE_SCHEMA}").unwrap();
    writeln!(out, "# label={label} alpha={} mu={}", trace.alpha, trace.mu).unwrap();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(TRACE_COLUMNS).unwrap();
        for r in &trace.records {
            w.write_record([
                r.iteration.to_string(),
                r.oracle_calls.to_string(),
                r.value.to_string(),
                r.best_value.to_string(),
                r.elapsed_ns.to_string(),
                r.step_norm.to_string(),
            ])
            .unwrap();
        }
        w.flush().unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSeries {
    pub label: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TraceSeries {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Reads a trace written by [`trace_csv`]. The label falls back to the file
/// stem.
pub fn read_trace(path: &Path) -> Result<TraceSeries, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim_end) != Some(TRACE_SCHEMA) {
        return Err(format!("{}: missing '{TRACE_SCHEMA}' header", path.display()));
    }
    let label = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .flat_map(|l| l.split(' '))
        .find_map(|kv| kv.strip_prefix("label="))
        .map(str::to_string)
        .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| format!("{}: {e}", path.display()))?
        .iter()
        .map(str::to_string)
        .collect();
    if columns.is_empty() {
        return Err(format!("{}: no header row", path.display()));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        let row = rec
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| format!("{}: data row {}: {e}", path.display(), i + 1))?;
        if row.len() != columns.len() {
            return Err(format!("{}: data row {} has {} fields, expected {}", path.display(), i + 1, row.len(), columns.len()));
        }
        rows.push(row);
    }
    Ok(TraceSeries { label, columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.txt", b"one").unwrap();
        write_atomic(dir.path(), "a.txt", b"two").unwrap();
        assert_eq!(std::fs::read(dir.path().join("a.txt")).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn names_follow_the_pattern() {
        assert_eq!(trace_file_name("rgf", &alpha_tag(Some(1e-3), "constant"), 4), "trace_rgf_a1e-3_s4.csv");
        assert_eq!(alpha_tag(None, "theory-global"), "theory-global");
    }
}
