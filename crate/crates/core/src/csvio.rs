//! Small CSV helpers shared by the file formats of the other modules.
//!
//! The formats are plain numeric tables with a fixed header, so this stays
//! deliberately simple: split on commas, no quoting.

use std::path::Path;
use std::str::FromStr;

use crate::error::{GspError, Result};

/// Formats a float with 17 significant digits so the value round-trips
/// bit-exactly through the text file.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| GspError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| GspError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        }
    }
    std::fs::write(path, contents).map_err(|e| GspError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Reads a CSV file, checks its header, and returns `(line_number, fields)`
/// for every non-empty data row.
pub fn read_rows(path: &Path, header: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let expected: Vec<&str> = header.split(',').collect();
    match lines.next() {
        Some((_, first)) => {
            let got: Vec<&str> = first.trim().split(',').map(str::trim).collect();
            if got != expected {
                return Err(GspError::Parse {
                    path: path.display().to_string(),
                    line: 1,
                    message: format!("expected header `{header}`, got `{}`", first.trim()),
                });
            }
        }
        None => {
            return Err(GspError::Parse {
                path: path.display().to_string(),
                line: 1,
                message: format!("empty file, expected header `{header}`"),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<String> = trimmed.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != expected.len() {
            return Err(GspError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                message: format!("expected {} fields, got {}", expected.len(), fields.len()),
            });
        }
        rows.push((idx + 1, fields));
    }
    Ok(rows)
}

pub fn parse_field<T: FromStr>(field: &str, path: &Path, line: usize, what: &str) -> Result<T> {
    field.parse::<T>().map_err(|_| GspError::Parse {
        path: path.display().to_string(),
        line,
        message: format!("cannot parse {what} from `{field}`"),
    })
}
