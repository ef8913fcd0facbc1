//! Seeded experiments regenerating the reference tables and figure data.
//!
//! Each experiment produces a CSV table, a JSON sidecar (resolved
//! configuration, wall time, library version, reference values with their
//! provenance) and a list of tolerance checks.

mod clt;
mod constants;
mod fixed_points;
mod patterns;
mod topk;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{argument, Result};
use crate::io::Table;
use crate::model::Algorithm;
use crate::patterns::Pattern;

/// Registered experiments and one-line descriptions.
pub const REGISTRY: &[(&str, &str)] = &[
    ("pattern-table", "pattern densities of the limiting permuton (quadrature and Monte Carlo)"),
    ("local-clt", "consecutive-pattern proportions for profile weights against their normal limit"),
    ("local-clt-exp", "consecutive-pattern proportions for exponential Sukhatme weights"),
    ("inversions-clt", "inversion proportions against their normal limit"),
    ("fixed-points", "fixed-point counts of Luce permutations"),
    ("topk-compare", "last-drawn probability: exact Luce versus permuton samples"),
    ("permuton-convergence", "pattern proportions of one large sample against permuton limits"),
    ("constants", "exact local-limit constants"),
];

/// User-facing options; unset fields take per-experiment defaults, and the
/// resolved values are echoed in the sidecar.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ExperimentConfig {
    pub weights: Option<String>,
    pub patterns: Vec<Pattern>,
    pub n: Vec<usize>,
    pub reps: Option<u64>,
    pub mc_samples: Option<u64>,
    pub alpha: Option<String>,
    pub labels: Vec<usize>,
    pub seed: u64,
    #[serde(serialize_with = "ser_algo")]
    pub algo: Algorithm,
}

fn ser_algo<S: serde::Serializer>(a: &Algorithm, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(algo_name(*a))
}

pub(crate) fn algo_name(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Sequential => "sequential",
        Algorithm::Race => "race",
    }
}

/// Where a reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Value reported in the literature this artifact reproduces.
    Literature,
    /// Exact computation in this library.
    Exact,
    /// Numerical integration in this library.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reference {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub provenance: Provenance,
}

impl Reference {
    pub fn new(name: impl Into<String>, value: f64, provenance: Provenance) -> Self {
        Reference { name: name.into(), value, exact: None, provenance }
    }

    pub fn exact(name: impl Into<String>, value: &crate::ExactRational) -> Self {
        Reference { name: name.into(), value: value.to_f64(), exact: Some(value.to_string()), provenance: Provenance::Exact }
    }
}

/// One tolerance gate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub reference: f64,
    pub tolerance: String,
    pub passed: bool,
}

impl Check {
    /// `|observed - reference| ≤ tol`.
    pub fn absolute(name: impl Into<String>, observed: f64, reference: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            reference,
            tolerance: format!("abs {tol}"),
            passed: (observed - reference).abs() <= tol,
        }
    }

    /// `|observed - reference| ≤ k · stderr`.
    pub fn stderrs(name: impl Into<String>, observed: f64, stderr: f64, reference: f64, k: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            reference,
            tolerance: format!("{k} stderr = {}", k * stderr),
            passed: (observed - reference).abs() <= k * stderr,
        }
    }

    /// `|observed / reference - 1| ≤ rel`.
    pub fn relative(name: impl Into<String>, observed: f64, reference: f64, rel: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            reference,
            tolerance: format!("rel {rel}"),
            passed: (observed / reference - 1.0).abs() <= rel,
        }
    }

    /// `observed ≥ threshold`.
    pub fn at_least(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            reference: threshold,
            tolerance: format!(">= {threshold}"),
            passed: observed >= threshold,
        }
    }

    /// `observed > threshold`.
    pub fn greater(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            reference: threshold,
            tolerance: format!("> {threshold}"),
            passed: observed > threshold,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            observed: f64::from(u8::from(passed)),
            reference: 1.0,
            tolerance: "holds".into(),
            passed,
        }
    }
}

/// What an experiment hands back to the harness.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub config: Value,
    pub table: Table,
    pub references: Vec<Reference>,
    pub checks: Vec<Check>,
    pub summary: Value,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub name: String,
    pub outcome: Outcome,
    pub wall_time: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcome.checks.iter().all(|c| c.passed)
    }

    pub fn metadata(&self) -> Value {
        json!({
            "experiment": self.name,
            "schema": format!("{}/1", self.name),
            "columns": self.outcome.table.header,
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.outcome.config,
            "wall_time_seconds": self.wall_time,
            "references": self.outcome.references,
            "checks": self.outcome.checks,
            "summary": self.outcome.summary,
        })
    }

    /// Writes `<dir>/<name>.csv` and `<dir>/<name>.json`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.name));
        let meta = dir.join(format!("{}.json", self.name));
        self.outcome.table.write_csv(&csv)?;
        std::fs::write(&meta, serde_json::to_string_pretty(&self.metadata())? + "\n")?;
        Ok((csv, meta))
    }
}

pub fn run(name: &str, cfg: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let outcome = match name {
        "pattern-table" => patterns::pattern_table(cfg),
        "local-clt" => clt::local_clt(cfg, false),
        "local-clt-exp" => clt::local_clt(cfg, true),
        "inversions-clt" => clt::inversions_clt(cfg),
        "fixed-points" => fixed_points::fixed_points(cfg),
        "topk-compare" => topk::topk_compare(cfg),
        "permuton-convergence" => patterns::permuton_convergence(cfg),
        "constants" => constants::constants(cfg),
        _ => Err(argument(format!("unknown experiment {name:?}; registered: {}", registry_names()))),
    }?;
    Ok(Report { name: name.to_string(), outcome, wall_time: start.elapsed().as_secs_f64() })
}

pub fn registry_names() -> String {
    REGISTRY.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
}

pub(crate) fn patterns_or(cfg: &ExperimentConfig, default: &[&str]) -> Vec<Pattern> {
    if cfg.patterns.is_empty() {
        default.iter().map(|s| s.parse().expect("built-in pattern")).collect()
    } else {
        cfg.patterns.clone()
    }
}

pub(crate) fn one_n(cfg: &ExperimentConfig, default: usize) -> Result<usize> {
    match cfg.n.as_slice() {
        [] => Ok(default),
        [n] => Ok(*n),
        _ => Err(argument("this experiment takes a single --n")),
    }
}

pub(crate) fn positive(name: &str, v: u64) -> Result<u64> {
    if v == 0 {
        return Err(argument(format!("{name} must be at least 1")));
    }
    Ok(v)
}

pub(crate) const SMALL_PATTERNS: [&str; 8] = ["12", "21", "123", "213", "132", "231", "312", "321"];
