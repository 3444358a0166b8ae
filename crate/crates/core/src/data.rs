//! LIBSVM text datasets.
//!
//! Each line is `label idx:val idx:val ...` with 1-based, strictly
//! increasing feature indices. Blank lines are skipped and anything after
//! `#` is a comment. Indices are stored 0-based. Gzip input is not handled;
//! decompress first.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::linalg::SparseVector;

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    rows: Vec<SparseVector>,
    labels: Vec<f64>,
    dim: usize,
}

impl Dataset {
    pub fn new(rows: Vec<SparseVector>, labels: Vec<f64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if rows.len() != labels.len() {
            return Err(Error::invalid("row and label counts differ"));
        }
        let dim = rows[0].dim();
        if rows.iter().any(|r| r.dim() != dim) {
            return Err(Error::invalid("rows have different dimensions"));
        }
        Ok(Dataset { rows, labels, dim })
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Re-embeds every row in dimension `dim`, which must cover every index.
    pub fn with_dim(self, dim: usize) -> Result<Self> {
        if dim < self.dim {
            return Err(Error::invalid(format!(
                "requested dimension {dim} is below the largest feature index + 1 ({})",
                self.dim
            )));
        }
        let rows = self.rows.iter().map(|r| r.with_dim(dim)).collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            rows,
            labels: self.labels,
            dim,
        })
    }
}

/// Parses LIBSVM text.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut parsed: Vec<(f64, Vec<u32>, Vec<f64>)> = Vec::new();
    let mut max_index: Option<u32> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: lineno, message };
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("content is non-empty");
        let label: f64 = label_tok
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(format!("bad label {label_tok:?}")))?;
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut prev: Option<u32> = None;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected index:value, got {tok:?}")))?;
            let idx: u32 = idx
                .parse()
                .map_err(|_| err(format!("bad feature index in {tok:?}")))?;
            if idx == 0 {
                return Err(err(format!("feature indices are 1-based, got 0 in {tok:?}")));
            }
            let val: f64 = val
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| err(format!("bad feature value in {tok:?}")))?;
            if let Some(p) = prev {
                if idx <= p {
                    return Err(err(format!("feature index {idx} does not increase (after {p})")));
                }
            }
            prev = Some(idx);
            max_index = Some(max_index.map_or(idx, |m| m.max(idx)));
            if val != 0.0 {
                indices.push(idx - 1);
                values.push(val);
            }
        }
        parsed.push((label, indices, values));
    }
    if parsed.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dim = max_index.map_or(0, |m| m as usize);
    let mut rows = Vec::with_capacity(parsed.len());
    let mut labels = Vec::with_capacity(parsed.len());
    for (label, indices, values) in parsed {
        rows.push(SparseVector::new(indices, values, dim)?);
        labels.push(label);
    }
    Dataset::new(rows, labels)
}

pub fn parse_libsvm_str(text: &str) -> Result<Dataset> {
    parse_libsvm(text.as_bytes())
}

/// Writes the dataset back as LIBSVM text with shortest round-trip floats.
pub fn to_libsvm_string(ds: &Dataset) -> String {
    let mut out = String::new();
    for (row, label) in ds.rows.iter().zip(&ds.labels) {
        write!(out, "{label}").expect("writing to a String");
        for (i, v) in row.indices().iter().zip(row.values()) {
            write!(out, " {}:{v}", i + 1).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

/// Scales every row to unit Euclidean norm.
pub fn normalize_rows(ds: &Dataset) -> Result<Dataset> {
    let mut rows = Vec::with_capacity(ds.len());
    for (index, row) in ds.rows.iter().enumerate() {
        let norm = row.norm2_sq().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroRow { index });
        }
        rows.push(if (norm - 1.0).abs() <= f64::EPSILON { row.clone() } else { row.scaled(1.0 / norm)? });
    }
    Ok(Dataset {
        rows,
        labels: ds.labels.clone(),
        dim: ds.dim,
    })
}
