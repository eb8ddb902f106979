//! Reading and writing the on-disk table format.
//!
//! Tables are plain UTF-8 text: one row per line terminated by `\n`, fields
//! separated by single tabs, no header. Numbers are written in Rust's
//! shortest round-trip form, so writing and re-reading a matrix reproduces
//! every value bit for bit, and identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::types::Dataset;

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound {
                path: path.to_path_buf(),
            }
        } else {
            Error::Io {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Splits file contents into lines. A trailing `\n` terminates the last
/// row rather than opening an empty one; `\r` is not treated as part of a
/// line terminator, so CRLF input fails the field parse instead of being
/// silently accepted.
fn split_rows(contents: &str) -> Vec<&str> {
    let mut rows: Vec<&str> = contents.split('\n').collect();
    if rows.last() == Some(&"") {
        rows.pop();
    }
    rows
}

fn parse_cell(field: &str, line: usize, col: usize) -> Result<f64> {
    let value: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        col,
        message: format!("{field:?} is not a number"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            col,
            message: format!("{field:?} is not finite"),
        });
    }
    Ok(value)
}

/// Reads a tab-separated matrix of finite numbers.
///
/// Every row must have the same number of fields. Parse errors report
/// 1-based line and field positions.
pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let contents = read_file(path)?;
    let rows = split_rows(&contents);
    let mut parsed: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    let mut width: Option<usize> = None;
    for (i, row) in rows.iter().enumerate() {
        let line = i + 1;
        let fields: Vec<&str> = row.split('\t').collect();
        if let Some(expected) = width {
            if fields.len() != expected {
                return Err(Error::RaggedRows {
                    line,
                    expected,
                    found: fields.len(),
                });
            }
        } else {
            width = Some(fields.len());
        }
        let mut values = Vec::with_capacity(fields.len());
        for (j, field) in fields.iter().enumerate() {
            values.push(parse_cell(field, line, j + 1)?);
        }
        parsed.push(values);
    }
    Matrix::from_rows(&parsed)
}

/// Writes a matrix in the canonical form read back by [`read_matrix`].
pub fn write_matrix(path: &Path, matrix: &Matrix) -> Result<()> {
    let mut out = String::new();
    for row in matrix.iter_rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push('\t');
            }
            write!(out, "{v}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Reads integer labels, one per line.
pub fn read_labels(path: &Path) -> Result<Vec<i64>> {
    let contents = read_file(path)?;
    let rows = split_rows(&contents);
    let mut labels = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let line = i + 1;
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != 1 {
            return Err(Error::RaggedRows {
                line,
                expected: 1,
                found: fields.len(),
            });
        }
        let label: i64 = fields[0].parse().map_err(|_| Error::Parse {
            line,
            col: 1,
            message: format!("{:?} is not an integer label", fields[0]),
        })?;
        labels.push(label);
    }
    Ok(labels)
}

/// Writes integer labels, one per line.
pub fn write_labels(path: &Path, labels: &[i64]) -> Result<()> {
    let mut out = String::new();
    for l in labels {
        writeln!(out, "{l}").expect("writing to a String cannot fail");
    }
    write_file(path, &out)
}

/// Reads a dataset from a points file plus an optional labels file. The
/// dataset name is the points file stem. Structural validation (label
/// count, finiteness) is left to [`Dataset::validate`] at the point of use.
pub fn read_dataset(points_path: &Path, labels_path: Option<&Path>) -> Result<Dataset> {
    let points = read_matrix(points_path)?;
    let labels = labels_path.map(read_labels).transpose()?;
    let name = points_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Ok(Dataset {
        name,
        points,
        labels,
    })
}
