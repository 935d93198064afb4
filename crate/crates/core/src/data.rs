//! LIBSVM text format and synthetic dataset generators.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::Result;
use crate::rng::RngStream;
use crate::sparse::SparseMatrix;
use crate::vector::dot;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("no data lines")]
    Empty,
    #[error("invalid label '{0}'")]
    BadLabel(String),
    #[error("expected 'index:value', found '{0}'")]
    BadToken(String),
    #[error("invalid feature index '{0}'")]
    BadIndex(String),
    #[error("feature indices are 1-based, found 0")]
    ZeroIndex,
    #[error("feature index {got} does not increase past {prev}")]
    NonIncreasing { prev: usize, got: usize },
    #[error("invalid feature value '{0}'")]
    BadValue(String),
    #[error("feature index {index} exceeds the declared dimension {declared}")]
    BeyondDeclared { index: usize, declared: usize },
    #[error("read failed: {0}")]
    Io(String),
}

/// A parse failure at a 1-based line number (0 when not tied to a line).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub features: SparseMatrix,
    /// Labels as written in the source.
    pub labels: Vec<f64>,
    /// Sorted distinct labels; class `k` (1-based) is `class_labels[k - 1]`.
    pub class_labels: Vec<f64>,
    pub provenance: String,
}

impl LabeledDataset {
    pub fn new(features: SparseMatrix, labels: Vec<f64>, provenance: impl Into<String>) -> Self {
        let mut class_labels = labels.clone();
        class_labels.sort_by(f64::total_cmp);
        class_labels.dedup();
        LabeledDataset { features, labels, class_labels, provenance: provenance.into() }
    }

    pub fn samples(&self) -> usize {
        self.features.rows()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn classes(&self) -> usize {
        self.class_labels.len()
    }

    /// Class numbers `1..=c` in sorted-label order.
    pub fn class_ids(&self) -> Vec<usize> {
        self.labels
            .iter()
            .map(|y| self.class_labels.binary_search_by(|c| c.total_cmp(y)).expect("label is a class") + 1)
            .collect()
    }

    /// Two-class labels as ±1, the smaller label mapping to −1.
    pub fn signed_labels(&self) -> Option<Vec<i64>> {
        if self.classes() != 2 {
            return None;
        }
        Some(self.class_ids().into_iter().map(|k| if k == 1 { -1 } else { 1 }).collect())
    }

    /// `(class number, original label)` pairs.
    pub fn class_mapping(&self) -> Vec<(usize, f64)> {
        self.class_labels.iter().enumerate().map(|(k, &y)| (k + 1, y)).collect()
    }
}

fn parse_line(
    line: &str,
    lineno: usize,
    declared: Option<usize>,
) -> std::result::Result<Option<(f64, Vec<(usize, f64)>)>, ParseError> {
    let err = |kind| ParseError { line: lineno, kind };
    let content = line.split('#').next().unwrap_or("").trim_end_matches('\r');
    let mut tokens = content.split_whitespace();
    let Some(label) = tokens.next() else {
        return Ok(None);
    };
    let label: f64 = match label.parse::<f64>() {
        Ok(v) if v.is_finite() => v,
        _ => return Err(err(ParseErrorKind::BadLabel(label.to_string()))),
    };
    let mut entries = Vec::new();
    let mut prev = 0usize;
    for tok in tokens {
        let (idx, val) = tok.split_once(':').ok_or_else(|| err(ParseErrorKind::BadToken(tok.to_string())))?;
        let idx: usize = idx.parse().map_err(|_| err(ParseErrorKind::BadIndex(idx.to_string())))?;
        if idx == 0 {
            return Err(err(ParseErrorKind::ZeroIndex));
        }
        if idx <= prev {
            return Err(err(ParseErrorKind::NonIncreasing { prev, got: idx }));
        }
        if let Some(declared) = declared {
            if idx > declared {
                return Err(err(ParseErrorKind::BeyondDeclared { index: idx, declared }));
            }
        }
        let val: f64 = match val.parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ => return Err(err(ParseErrorKind::BadValue(val.to_string()))),
        };
        prev = idx;
        entries.push((idx - 1, val));
    }
    Ok(Some((label, entries)))
}

/// Reads LIBSVM text. The feature dimension is the largest index seen unless
/// `declared_dim` pads it (indices beyond a declared dimension are errors).
pub fn parse_libsvm<R: BufRead>(
    reader: R,
    declared_dim: Option<usize>,
) -> std::result::Result<LabeledDataset, ParseError> {
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    let mut max_col = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ParseError { line: i + 1, kind: ParseErrorKind::Io(e.to_string()) })?;
        if let Some((label, entries)) = parse_line(&line, i + 1, declared_dim)? {
            if let Some(&(c, _)) = entries.last() {
                max_col = max_col.max(c + 1);
            }
            labels.push(label);
            rows.push(entries);
        }
    }
    if labels.is_empty() {
        return Err(ParseError { line: 0, kind: ParseErrorKind::Empty });
    }
    let cols = declared_dim.unwrap_or(max_col);
    let features = SparseMatrix::from_rows(cols, rows)
        .map_err(|e| ParseError { line: 0, kind: ParseErrorKind::Io(e.to_string()) })?;
    Ok(LabeledDataset::new(features, labels, "libsvm"))
}

pub fn parse_libsvm_str(text: &str, declared_dim: Option<usize>) -> std::result::Result<LabeledDataset, ParseError> {
    parse_libsvm(text.as_bytes(), declared_dim)
}

/// Writes LIBSVM text with shortest round-trip number formatting.
pub fn write_libsvm<W: Write>(data: &LabeledDataset, mut out: W) -> std::io::Result<()> {
    let mut line = String::new();
    for (i, label) in data.labels.iter().enumerate() {
        line.clear();
        write!(line, "{label}").expect("writing to a String");
        let (idx, val) = data.features.row(i);
        for (j, v) in idx.iter().zip(val) {
            write!(line, " {}:{v}", j + 1).expect("writing to a String");
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

/// A generated binary dataset together with the planted weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedDataset {
    pub dataset: LabeledDataset,
    pub weights: Vec<f64>,
}

/// `X` with i.i.d. N(0,1) entries, weights `w ~ N(0, I)` (or `weights` when
/// given), noise `ε ~ N(0, noise_scale² I)`, labels `+1` where `Xw + ε ≥ 0`
/// and `−1` elsewhere.
pub fn generate_random_dataset(
    m: usize,
    p: usize,
    noise_scale: f64,
    weights: Option<Vec<f64>>,
    rng: &RngStream,
) -> Result<GeneratedDataset> {
    use crate::error::Error;
    if m == 0 || p == 0 {
        return Err(Error::Config("generated datasets need m, p >= 1".into()));
    }
    if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
        return Err(Error::Config(format!("noise scale must be finite and non-negative, got {noise_scale}")));
    }
    let weights = match weights {
        Some(w) if w.len() != p => return Err(Error::DimensionMismatch { expected: p, got: w.len() }),
        Some(w) => w,
        None => rng.substream(1).normal_vec(p),
    };
    let mut xs = rng.substream(0);
    let mut noise = rng.substream(2);
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let x = xs.normal_vec(p);
        let score = dot(&x, &weights) + noise_scale * noise.standard_normal();
        labels.push(if score >= 0.0 { 1.0 } else { -1.0 });
        rows.push(x.into_iter().enumerate().collect::<Vec<_>>());
    }
    let features = SparseMatrix::from_rows(p, rows)?;
    let provenance = format!("generated m={m} p={p} noise={noise_scale} seed={} stream={}", rng.seed(), rng.stream_id());
    Ok(GeneratedDataset { dataset: LabeledDataset::new(features, labels, provenance), weights })
}

/// Sparse multiclass data: each feature present with probability `density`
/// (values N(0,1)); label `k` maximizes `w_kᵀx + noise` for planted `w_k`.
pub fn generate_multiclass(
    m: usize,
    p: usize,
    classes: usize,
    density: f64,
    rng: &RngStream,
) -> Result<LabeledDataset> {
    use crate::error::Error;
    if m == 0 || p == 0 || classes < 2 {
        return Err(Error::Config("multiclass data needs m, p >= 1 and at least 2 classes".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Config(format!("density must lie in (0, 1], got {density}")));
    }
    let mut wr = rng.substream(1);
    let planted: Vec<Vec<f64>> = (0..classes).map(|_| wr.normal_vec(p)).collect();
    let mut xs = rng.substream(0);
    let mut noise = rng.substream(2);
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let mut row = Vec::new();
        for j in 0..p {
            if xs.uniform() < density {
                row.push((j, xs.standard_normal()));
            }
        }
        let best = planted
            .iter()
            .map(|w| row.iter().map(|&(j, v)| w[j] * v).sum::<f64>() + 0.1 * noise.standard_normal())
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k)
            .expect("at least two classes");
        labels.push((best + 1) as f64);
        rows.push(row);
    }
    let features = SparseMatrix::from_rows(p, rows)?;
    let provenance = format!("generated multiclass m={m} p={p} c={classes} density={density} seed={}", rng.seed());
    Ok(LabeledDataset::new(features, labels, provenance))
}
