//! Registry of named, reproducible checks that tie the bound engine, the
//! Monte Carlo engine and the spectral scans to exact oracles.
//!
//! A failing bound is data: it marks the experiment and the suite failed and
//! is reported with its margin. Only unknown ids are errors.

mod experiments;
pub mod oracles;

pub use experiments::REGISTRY;

use crate::rng::derive_seed;
use rayon::prelude::*;
use serde::Serialize;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("unknown experiment or suite `{0}`")]
    UnknownId(String),
    #[error("budget scale must be positive, got {0}")]
    InvalidBudget(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    ClosedForm,
    BruteForce,
    McCrossCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
    /// Monte Carlo quantities may exceed their target by this many standard
    /// errors.
    StandardErrors(f64),
    /// Measured value must not exceed the bound at all.
    Exact,
}

/// Registry entry.
pub struct Experiment {
    pub id: &'static str,
    pub description: &'static str,
    /// Acceptance criterion this experiment belongs to, if any.
    pub criterion: Option<u8>,
    pub oracle: OracleKind,
    pub tolerance: Tolerance,
    pub run: fn(&Context) -> Outcome,
}

/// Per-experiment seed and budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Context {
    pub seed: u64,
    pub scale: f64,
}

impl Context {
    /// Path count scaled by the budget, never below 1000.
    pub fn paths(&self, n: usize) -> usize {
        ((n as f64 * self.scale).round() as usize).max(1000)
    }

    pub fn sub_seed(&self, label: &str) -> u64 {
        derive_seed(self.seed, label)
    }
}

/// One comparison inside an experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub bound: f64,
    pub se: Option<f64>,
    /// Positive when the check passes with room to spare.
    pub margin: f64,
    pub passed: bool,
}

impl Check {
    /// `measured ≤ bound`, allowing `k` standard errors when `se` is given.
    pub fn at_most(label: impl Into<String>, measured: f64, bound: f64, se: Option<f64>, k: f64) -> Self {
        let slack = se.map_or(0.0, |s| k * s);
        let margin = bound + slack - measured;
        Self { label: label.into(), measured, bound, se, margin, passed: margin >= 0.0 }
    }

    /// `|measured − target| ≤ tol`.
    pub fn close(label: impl Into<String>, measured: f64, target: f64, tol: f64, se: Option<f64>) -> Self {
        let margin = tol - (measured - target).abs();
        Self { label: label.into(), measured, bound: target, se, margin, passed: margin >= 0.0 }
    }

    /// `|measured − target| ≤ k·se`.
    pub fn within_se(label: impl Into<String>, measured: f64, target: f64, se: f64, k: f64) -> Self {
        Self::close(label, measured, target, k * se, Some(se))
    }

    pub fn flag(label: impl Into<String>, ok: bool) -> Self {
        Self {
            label: label.into(),
            measured: ok as u8 as f64,
            bound: 1.0,
            se: None,
            margin: if ok { 1.0 } else { -1.0 },
            passed: ok,
        }
    }
}

/// Result of running one experiment.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub notes: Vec<(String, f64)>,
    pub error: Option<String>,
}

impl Outcome {
    pub fn push(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self
    }

    pub fn note(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.notes.push((key.into(), value));
        self
    }

    pub fn failed(message: impl Into<String>) -> Self {
        Self { error: Some(message.into()), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    // First failing check, else the tightest one.
    fn headline(&self) -> Option<&Check> {
        self.checks
            .iter()
            .find(|c| !c.passed)
            .or_else(|| self.checks.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub id: String,
    pub status: Status,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub se: Option<f64>,
    pub runtime_ms: f64,
    pub seed: u64,
    pub criterion: Option<u8>,
    pub description: String,
    pub oracle: OracleKind,
    pub tolerance: Tolerance,
    pub checks: Vec<Check>,
    pub notes: Vec<(String, f64)>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub scale: f64,
    pub experiments: Vec<ExperimentReport>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per experiment with the headline columns.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "status", "measured", "bound", "margin", "se", "runtime_ms"]).expect("in-memory write");
        for e in &self.experiments {
            let status = match e.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
            };
            w.write_record([
                e.id.clone(),
                status.to_string(),
                e.measured.to_string(),
                e.bound.to_string(),
                e.margin.to_string(),
                e.se.map_or(String::new(), |s| s.to_string()),
                format!("{:.3}", e.runtime_ms),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn get(&self, id: &str) -> Option<&ExperimentReport> {
        self.experiments.iter().find(|e| e.id == id)
    }
}

pub fn find(id: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.id == id)
}

/// Resolves `"all"`, `"criterion-N"` or explicit ids.
pub fn select(ids: &[&str]) -> Result<Vec<&'static Experiment>, VerifyError> {
    let mut out: Vec<&'static Experiment> = Vec::new();
    for &id in ids {
        let found: Vec<&'static Experiment> = if id == "all" {
            REGISTRY.iter().collect()
        } else if let Some(n) = id.strip_prefix("criterion-").and_then(|n| n.parse::<u8>().ok()) {
            REGISTRY.iter().filter(|e| e.criterion == Some(n)).collect()
        } else {
            find(id).into_iter().collect()
        };
        if found.is_empty() {
            return Err(VerifyError::UnknownId(id.to_string()));
        }
        for e in found {
            if !out.iter().any(|o| o.id == e.id) {
                out.push(e);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    /// Multiplies every Monte Carlo path count.
    pub scale: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

pub fn run_experiment(e: &Experiment, seed: u64, options: RunOptions) -> ExperimentReport {
    let ctx = Context { seed: derive_seed(seed, e.id), scale: options.scale };
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| (e.run)(&ctx)))
        .unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Outcome::failed(msg)
        });
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let head = outcome.headline().cloned();
    ExperimentReport {
        id: e.id.to_string(),
        status: if outcome.passed() { Status::Pass } else { Status::Fail },
        measured: head.as_ref().map_or(f64::NAN, |c| c.measured),
        bound: head.as_ref().map_or(f64::NAN, |c| c.bound),
        margin: head.as_ref().map_or(f64::NAN, |c| c.margin),
        se: head.as_ref().and_then(|c| c.se),
        runtime_ms,
        seed: ctx.seed,
        criterion: e.criterion,
        description: e.description.to_string(),
        oracle: e.oracle,
        tolerance: e.tolerance,
        checks: outcome.checks,
        notes: outcome.notes,
        error: outcome.error,
    }
}

/// Runs the selected experiments; results are listed in registry order.
pub fn run(ids: &[&str], seed: u64, options: RunOptions) -> Result<Report, VerifyError> {
    if !(options.scale > 0.0 && options.scale.is_finite()) {
        return Err(VerifyError::InvalidBudget(options.scale));
    }
    let selected = select(ids)?;
    let experiments: Vec<ExperimentReport> =
        selected.par_iter().map(|e| run_experiment(e, seed, options)).collect();
    let passed = experiments.iter().all(|e| e.status == Status::Pass);
    Ok(Report { suite: ids.join(","), seed, scale: options.scale, experiments, passed })
}
