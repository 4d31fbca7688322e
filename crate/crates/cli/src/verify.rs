//! `heatbounds verify`: run registered experiments and report.

use crate::config::{usage, Format, Output, Provenance, UsageError};
use anyhow::Result;
use clap::Args;
use heatbounds::verify::{self, RunOptions, Status};
use serde::{Deserialize, Serialize};

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct VerifyArgs {
    /// `all`, `criterion-N` or experiment ids, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub suite: Option<Vec<String>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Multiplies every Monte Carlo path count.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Print the registry and exit.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub list: Option<bool>,
}

pub fn run(args: &VerifyArgs, out: &Output, prov: &Provenance) -> Result<i32> {
    if args.list == Some(true) {
        for e in verify::REGISTRY {
            let c = e.criterion.map_or(String::from("-"), |c| c.to_string());
            println!("{:<32} {:>2}  {}", e.id, c, e.description);
        }
        return Ok(0);
    }
    let suite = args.suite.clone().unwrap_or_else(|| vec!["all".into()]);
    let ids: Vec<&str> = suite.iter().map(String::as_str).collect();
    if ids.is_empty() {
        return usage("empty --suite");
    }
    let seed = args.seed.unwrap_or(0);
    let options = RunOptions { scale: args.scale.unwrap_or(1.0) };
    let report = verify::run(&ids, seed, options).map_err(|e| UsageError(e.to_string()))?;
    for e in &report.experiments {
        let status = if e.status == Status::Pass { "PASS" } else { "FAIL" };
        let detail = match &e.error {
            Some(err) => format!("error: {err}"),
            None => format!("measured {:.6} bound {:.6} margin {:.3e}", e.measured, e.bound, e.margin),
        };
        eprintln!("{status} {:<32} {detail} ({:.0} ms)", e.id, e.runtime_ms);
    }
    let mut json = serde_json::to_value(&report)?;
    json["provenance"] = serde_json::to_value(prov)?;
    let text = serde_json::to_string_pretty(&json)?;
    println!("{text}");
    out.write(Format::Json, "report.json", &text)?;
    out.write(Format::Csv, "report.csv", &report.to_csv())?;
    eprintln!(
        "{}: {}/{} passed",
        if report.passed { "suite passed" } else { "suite FAILED" },
        report.experiments.iter().filter(|e| e.status == Status::Pass).count(),
        report.experiments.len()
    );
    Ok(if report.passed { 0 } else { 1 })
}
