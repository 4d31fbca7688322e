//! `heatbounds spectral`: sup norms of unit band projections and their slopes.

use crate::config::{to_csv, usage, Format, Grid, Output, Provenance, UsageError};
use crate::plot;
use anyhow::Result;
use clap::Args;
use heatbounds::spectral::{default_resolution, scaling_scan, Signal};
use heatbounds::{BandConvention, BoundaryCondition, Domain, SpectralBasis};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct SpectralArgs {
    /// interval, circle or rectangle.
    #[arg(long)]
    pub domain: Option<String>,
    /// dirichlet or neumann (ignored on the circle).
    #[arg(long)]
    pub bc: Option<String>,
    /// Length, or the x side of the rectangle. π by default.
    #[arg(long)]
    pub length: Option<f64>,
    /// y side of the rectangle. π by default.
    #[arg(long)]
    pub ly: Option<f64>,
    #[arg(long)]
    pub lmin: Option<u32>,
    #[arg(long)]
    pub lmax: Option<u32>,
    /// Explicit band parameters, overriding lmin..lmax.
    #[arg(long)]
    pub lambda: Option<Grid>,
    /// frequency (bands in √eigenvalue) or eigenvalue.
    #[arg(long)]
    pub convention: Option<String>,
    /// Grid points per axis for the sup norms.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// flat (unit coefficients) or box (indicator of the first half in x).
    #[arg(long)]
    pub signal: Option<String>,
}

fn domain(args: &SpectralArgs) -> Result<Domain> {
    let bc = match args.bc.as_deref().unwrap_or("dirichlet") {
        "dirichlet" => BoundaryCondition::Dirichlet,
        "neumann" => BoundaryCondition::Neumann,
        b => return usage(format!("unknown boundary condition `{b}`; use dirichlet or neumann")),
    };
    let length = args.length.unwrap_or(PI);
    Ok(match args.domain.as_deref().unwrap_or("interval") {
        "interval" => Domain::Interval { length, bc },
        "circle" => Domain::Circle { length: args.length.unwrap_or(2.0 * PI) },
        "rectangle" => Domain::Rectangle { lx: length, ly: args.ly.unwrap_or(PI), bc },
        d => return usage(format!("unknown domain `{d}`; use interval, circle or rectangle")),
    })
}

pub fn run(args: &SpectralArgs, out: &Output, prov: &Provenance) -> Result<i32> {
    let domain = domain(args)?;
    let convention = match args.convention.as_deref().unwrap_or("frequency") {
        "frequency" => BandConvention::Frequency,
        "eigenvalue" => BandConvention::Eigenvalue,
        c => return usage(format!("unknown band convention `{c}`; use frequency or eigenvalue")),
    };
    let lambdas: Vec<f64> = match &args.lambda {
        Some(g) => g.values.clone(),
        None => {
            let (lo, hi) = (args.lmin.unwrap_or(1), args.lmax.unwrap_or(64));
            if lo == 0 || hi < lo {
                return usage(format!("need 1 ≤ lmin ≤ lmax, got {lo} and {hi}"));
            }
            (lo..=hi).map(f64::from).collect()
        }
    };
    let top = lambdas.iter().copied().fold(1.0, f64::max);
    let cutoff = match convention {
        BandConvention::Frequency => top + 2.0,
        BandConvention::Eigenvalue => (top + 1.0).sqrt() + 1.0,
    };
    let signal = match args.signal.as_deref().unwrap_or("flat") {
        "flat" => Signal::flat(),
        "box" => {
            let half = match domain {
                Domain::Interval { length, .. } | Domain::Circle { length } => length / 2.0,
                Domain::Rectangle { lx, .. } => lx / 2.0,
            };
            Signal::function(move |x| (x[0] < half) as u8 as f64)
        }
        s => return usage(format!("unknown signal `{s}`; use flat or box")),
    };
    let bad = |e: heatbounds::SpectralError| UsageError(e.to_string());
    let basis = SpectralBasis::new(domain, cutoff).map_err(bad)?;
    let resolution = args.resolution.unwrap_or_else(|| default_resolution(&domain));
    let scan = scaling_scan(&basis, &signal, &lambdas, convention, resolution).map_err(bad)?;

    let header: Vec<String> = [
        "lambda",
        "band_size",
        "sup",
        "gradient_sup",
        "laplacian_sup",
        "band_l2",
        "chain_bound",
        "chain_display",
        "chain_holds",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<String>> = scan
        .rows
        .iter()
        .map(|r| {
            vec![
                r.lambda.to_string(),
                r.band_size.to_string(),
                r.sup.to_string(),
                r.gradient_sup.to_string(),
                r.laplacian_sup.to_string(),
                r.band_l2.to_string(),
                r.chain.bound.to_string(),
                r.chain.display.to_string(),
                r.chain_holds.to_string(),
            ]
        })
        .collect();
    let csv = to_csv(&header, &rows)?;
    print!("{csv}");
    eprintln!(
        "slopes: sup {:.4}, gradient {:.4}, laplacian {:.4}; chain {}",
        scan.slope_sup,
        scan.slope_gradient,
        scan.slope_laplacian,
        if scan.chain_holds { "holds on every row" } else { "FAILS on some row" }
    );
    out.write(Format::Csv, "spectral.csv", &csv)?;
    let report = json!({
        "command": "spectral",
        "domain": domain,
        "provenance": prov,
        "resolution": resolution,
        "scan": scan,
    });
    out.write(Format::Json, "spectral.json", &serde_json::to_string_pretty(&report)?)?;
    if out.wants(Format::Svg) {
        let series = |col: fn(&heatbounds::spectral::ScanRow) -> f64, name: &str| {
            (name.to_string(), scan.rows.iter().filter(|r| col(r) > 0.0).map(|r| (r.lambda.ln(), col(r).ln())).collect::<Vec<_>>())
        };
        let svg = plot::line_plot(
            "band projection sup norms (log-log)",
            "ln λ",
            "ln sup",
            &[series(|r| r.sup, "χf"), series(|r| r.gradient_sup, "dχf"), series(|r| r.laplacian_sup, "Δχf")],
        );
        out.write(Format::Svg, "spectral.svg", &svg)?;
    }
    Ok(if scan.chain_holds { 0 } else { 1 })
}
