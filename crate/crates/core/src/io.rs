//! File formats: weight vectors, permutations, CSV tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{argument, Error, Result};
use crate::model::{Permutation, WeightProfile, WeightVector};

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), line, message: message.into() }
}

/// Reads weights from a file holding one positive decimal per line, or a
/// JSON array of numbers. Blank lines are ignored.
pub fn read_weights(path: &Path) -> Result<WeightVector> {
    let text = fs::read_to_string(path)?;
    parse_weights(&text, path)
}

pub fn parse_weights(text: &str, path: &Path) -> Result<WeightVector> {
    let values = if text.trim_start().starts_with('[') {
        json_weights(text, path)?
    } else {
        let mut values = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| parse_error(path, i + 1, format!("not a number: {line:?}")))?;
            check_weight(v, path, i + 1)?;
            values.push(v);
        }
        values
    };
    if values.is_empty() {
        return Err(parse_error(path, 1, "no weights found"));
    }
    WeightVector::new(values)
}

fn check_weight(v: f64, path: &Path, line: usize) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(parse_error(path, line, format!("weight {v} must be positive and finite")));
    }
    Ok(())
}

fn json_weights(text: &str, path: &Path) -> Result<Vec<f64>> {
    let values: Vec<f64> = serde_json::from_str(text)
        .map_err(|e| parse_error(path, e.line(), format!("expected a JSON array of numbers: {e}")))?;
    // line of each element: count newlines before the element's separator
    let body_start = text.find('[').unwrap_or(0) + 1;
    let mut line = 1 + text[..body_start].matches('\n').count();
    let mut entry_lines = Vec::with_capacity(values.len());
    let mut pending = true;
    for ch in text[body_start..].chars() {
        match ch {
            '\n' => line += 1,
            ',' => pending = true,
            c if pending && !c.is_whitespace() && c != ']' => {
                entry_lines.push(line);
                pending = false;
            }
            _ => {}
        }
    }
    for (v, l) in values.iter().zip(entry_lines.iter().chain(std::iter::repeat(&line))) {
        check_weight(*v, path, *l)?;
    }
    Ok(values)
}

/// `sukhatme`, `constant[:C]`, `linear`, `exp-sukhatme:ALPHA`,
/// `steps:V1,V2,...` or `file:PATH`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightsSpec {
    Profile(WeightProfile),
    File(PathBuf),
}

impl WeightsSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        match spec.strip_prefix("file:") {
            Some(p) if !p.is_empty() => Ok(WeightsSpec::File(PathBuf::from(p))),
            Some(_) => Err(argument("file: needs a path")),
            None => Ok(WeightsSpec::Profile(WeightProfile::parse(spec)?)),
        }
    }

    /// Weights of size `n`; a file fixes its own size, and `n`, when given,
    /// must agree with it.
    pub fn resolve(&self, n: Option<usize>) -> Result<WeightVector> {
        match self {
            WeightsSpec::Profile(p) => p.weights(n.ok_or_else(|| argument("--n is required for profile weights"))?),
            WeightsSpec::File(path) => {
                let w = read_weights(path)?;
                match n {
                    Some(n) if n != w.len() => Err(argument(format!(
                        "{} holds {} weights but n = {n}",
                        path.display(),
                        w.len()
                    ))),
                    _ => Ok(w),
                }
            }
        }
    }

    pub fn profile(&self) -> Option<&WeightProfile> {
        match self {
            WeightsSpec::Profile(p) => Some(p),
            WeightsSpec::File(_) => None,
        }
    }
}

impl std::fmt::Display for WeightsSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightsSpec::Profile(p) => write!(f, "{p}"),
            WeightsSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

/// One permutation per non-blank line, whitespace-separated one-line notation.
pub fn read_permutations(path: &Path) -> Result<Vec<Permutation>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.parse::<Permutation>().map_err(|e| parse_error(path, i + 1, e.to_string()))
        })
        .collect()
}

pub fn write_permutations<W: Write>(out: &mut W, perms: &[Permutation]) -> Result<()> {
    for p in perms {
        writeln!(out, "{p}")?;
    }
    Ok(())
}

/// A header plus rows of already formatted cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_error)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV cells are UTF-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    /// Rows as JSON objects keyed by the header.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj = self.header.iter().cloned().zip(r.iter().map(|c| serde_json::Value::String(c.clone())));
                serde_json::Value::Object(obj.collect())
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Shortest round-trip decimal form, `.` separator.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
