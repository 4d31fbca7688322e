//! `heatbounds bounds`: evaluate a named bound over parameter grids.

use crate::config::{product, require, to_csv, usage, Format, Grid, Output, Provenance};
use crate::plot;
use anyhow::Result;
use clap::Args;
use heatbounds::bounds::{self, BoundResult, TheoremId};
use heatbounds::CurvatureBounds;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct BoundsArgs {
    /// Bound to evaluate: thm1, thm2, thm3, cor-est, thm-c2, cor-min, cor-1,
    /// c1-d, c1-n, cor-c1-d, iso-d, iso-n, eigen, eigen-d.
    #[arg(long)]
    pub name: Option<String>,
    /// Lower Ricci bound K_Z (K_φ for thm3 and c1-n).
    #[arg(long = "K", allow_hyphen_values = true)]
    #[serde(rename = "K")]
    pub k: Option<Grid>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<Grid>,
    /// Split time for cor-est, at most t. Defaults to t.
    #[arg(long)]
    pub s: Option<Grid>,
    /// ‖u‖∞.
    #[arg(long)]
    pub u: Option<Grid>,
    /// ‖Lu‖∞.
    #[arg(long = "Lu")]
    #[serde(rename = "Lu")]
    pub lu: Option<Grid>,
    #[arg(long)]
    pub delta: Option<Grid>,
    /// Eigenvalue, or λ1 for the isoperimetric bounds.
    #[arg(long)]
    pub lambda: Option<Grid>,
    #[arg(long)]
    pub alpha0: Option<Grid>,
    #[arg(long)]
    pub phi_sup: Option<Grid>,
    /// Lower Ricci bound without drift. Defaults to K.
    #[arg(long = "K0", allow_hyphen_values = true)]
    #[serde(rename = "K0")]
    pub k0: Option<Grid>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta_h: Option<Grid>,
    #[arg(long)]
    pub sigma: Option<Grid>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta_ii: Option<Grid>,
    /// Upper sectional curvature bound on the boundary collar.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<Grid>,
    #[arg(long)]
    pub r0: Option<Grid>,
    #[arg(long)]
    pub z_sup: Option<Grid>,
    #[arg(long)]
    pub z_collar: Option<Grid>,
    #[arg(long)]
    pub dim: Option<Grid>,
}

impl BoundsArgs {
    fn grid(&self, key: &str) -> Option<&Grid> {
        match key {
            "K" => self.k.as_ref(),
            "t" => self.t.as_ref(),
            "s" => self.s.as_ref(),
            "u" => self.u.as_ref(),
            "Lu" => self.lu.as_ref(),
            "delta" => self.delta.as_ref(),
            "lambda" => self.lambda.as_ref(),
            "alpha0" => self.alpha0.as_ref(),
            "phi-sup" => self.phi_sup.as_ref(),
            "K0" => self.k0.as_ref(),
            "theta-h" => self.theta_h.as_ref(),
            "sigma" => self.sigma.as_ref(),
            "theta-ii" => self.theta_ii.as_ref(),
            "kappa" => self.kappa.as_ref(),
            "r0" => self.r0.as_ref(),
            "z-sup" => self.z_sup.as_ref(),
            "z-collar" => self.z_collar.as_ref(),
            "dim" => self.dim.as_ref(),
            _ => None,
        }
    }
}

// NaN marks "defaults to another parameter".
fn default_of(key: &str) -> Option<f64> {
    Some(match key {
        "alpha0" | "theta-h" | "sigma" | "theta-ii" | "kappa" | "z-sup" | "z-collar" => 0.0,
        "phi-sup" | "dim" => 1.0,
        "r0" => f64::INFINITY,
        "K0" | "s" => f64::NAN,
        _ => return None,
    })
}

const PACK: [&str; 10] = ["K", "K0", "theta-h", "sigma", "theta-ii", "kappa", "r0", "z-sup", "z-collar", "dim"];

fn params(id: TheoremId) -> Vec<&'static str> {
    use TheoremId::*;
    let mut p: Vec<&'static str> = match id {
        Thm1 => vec!["K", "t"],
        Thm2 => vec!["K", "alpha0", "t"],
        Thm3 => vec!["K", "phi-sup", "t"],
        ThmC2 => vec!["K", "t", "u", "Lu"],
        CorMin => vec!["K", "u", "Lu"],
        Cor1 => vec!["K", "delta", "u", "Lu"],
        C1D => vec!["K", "alpha0", "delta", "u", "Lu"],
        C1N => vec!["K", "phi-sup", "delta", "u", "Lu"],
        Eigen => vec!["lambda", "K"],
        EigenD => vec!["lambda", "K", "alpha0"],
        CorEst | CorC1D | IsoD | IsoN => PACK.to_vec(),
    };
    match id {
        CorEst => p.extend(["s", "t"]),
        CorC1D => p.extend(["delta", "u", "Lu"]),
        IsoD | IsoN => p.push("lambda"),
        _ => {}
    }
    p
}

struct Vals<'a> {
    keys: &'a [&'static str],
    row: &'a [f64],
}

impl Vals<'_> {
    fn get(&self, key: &str) -> f64 {
        let i = self.keys.iter().position(|k| *k == key).expect("parameter listed for this bound");
        let v = self.row[i];
        match (v.is_nan(), key) {
            (true, "K0") => self.get("K"),
            (true, "s") => self.get("t"),
            _ => v,
        }
    }

    fn pack(&self) -> (CurvatureBounds, usize) {
        let pack = CurvatureBounds {
            k_z: self.get("K"),
            k_0: self.get("K0"),
            theta_h: self.get("theta-h"),
            sigma: self.get("sigma"),
            theta_ii: self.get("theta-ii"),
            k: self.get("kappa"),
            r0: self.get("r0"),
            z_sup: self.get("z-sup"),
            z_collar: self.get("z-collar"),
        };
        (pack, self.get("dim").round().max(1.0) as usize)
    }
}

fn neg(x: f64) -> f64 {
    (-x).max(0.0)
}

fn evaluate(id: TheoremId, v: &Vals<'_>) -> Result<BoundResult> {
    use TheoremId::*;
    Ok(match id {
        Thm1 => bounds::grad_bound_closed(v.get("K"), v.get("t"))?,
        Thm2 => bounds::dirichlet_grad_bound(v.get("K"), v.get("alpha0"), v.get("t"))?,
        Thm3 => bounds::neumann_grad_bound(v.get("K"), v.get("phi-sup"), v.get("t"))?,
        ThmC2 => bounds::c2_bound(v.get("K"), v.get("t"), v.get("u"), v.get("Lu"))?,
        CorMin => bounds::c2_bound_minimized(v.get("K"), v.get("u"), v.get("Lu"))?,
        Cor1 => bounds::c2_bound_simple(neg(v.get("K")), v.get("delta"), v.get("u"), v.get("Lu"))?,
        C1D => bounds::c2_dirichlet_bound(neg(v.get("K")), v.get("alpha0"), v.get("delta"), v.get("u"), v.get("Lu"))?,
        C1N => bounds::c2_neumann_bound(neg(v.get("K")), v.get("phi-sup"), v.get("delta"), v.get("u"), v.get("Lu"))?,
        Eigen => bounds::eigen_grad_bound(v.get("lambda"), neg(v.get("K")))?,
        EigenD => bounds::dirichlet_eigen_bound(v.get("lambda"), neg(v.get("K")), v.get("alpha0"))?,
        CorEst => {
            let (pack, d) = v.pack();
            let e = bounds::neumann_explicit_bound(&pack, d, v.get("s"), v.get("t"))?;
            let mut r = e.a.clone();
            r.details.insert("time_only", e.b.value);
            r.details.insert("time_only_printed", e.b_printed);
            r.details.insert("phi_sup", e.phi_sup_estimate);
            r.details.insert("k_phi", e.k_phi);
            r.details.insert("r1", e.r1);
            r
        }
        CorC1D => {
            let (pack, d) = v.pack();
            bounds::c2_neumann_explicit(&pack, d, v.get("delta"), v.get("u"), v.get("Lu"))?
        }
        IsoD | IsoN => {
            let (pack, d) = v.pack();
            let kp = bounds::k_phi(&pack, d)?;
            let collar = if pack.sigma == 0.0 { 0.0 } else { pack.sigma * d as f64 * bounds::r1(pack.r0, pack.k, pack.theta_ii) };
            let iso = bounds::iso_explicit(&pack, d, (0.5 * collar).exp(), kp, v.get("lambda"))?;
            let (value, other, other_key) = if id == IsoD {
                (iso.kappa_d, iso.kappa_n, "iso_n")
            } else {
                (iso.kappa_n, iso.kappa_d, "iso_d")
            };
            let mut r = BoundResult { value, minimizer: None, theorem: id, details: BTreeMap::new() };
            r.details.insert(other_key, other);
            r
        }
    })
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

pub fn run(args: &BoundsArgs, out: &Output, prov: &Provenance) -> Result<i32> {
    let Some(name) = args.name.as_deref() else { return usage("missing parameter --name") };
    let id: TheoremId = match name.parse() {
        Ok(id) => id,
        Err(_) => {
            let known: Vec<&str> = TheoremId::ALL.iter().map(|t| t.as_str()).collect();
            return usage(format!("unknown bound `{name}`; known: {}", known.join(", ")));
        }
    };
    let keys = params(id);
    let mut axes = Vec::with_capacity(keys.len());
    for &k in &keys {
        let values = match args.grid(k) {
            Some(g) => g.values.clone(),
            None => vec![require(default_of(k), k)?],
        };
        axes.push(values);
    }
    // Resolve "defaults to another parameter" so tables show actual values.
    let points: Vec<Vec<f64>> = product(&axes)
        .into_iter()
        .map(|p| {
            let v = Vals { keys: &keys, row: &p };
            keys.iter().map(|k| v.get(k)).collect()
        })
        .collect();
    let mut results = Vec::with_capacity(points.len());
    for p in &points {
        let r = evaluate(id, &Vals { keys: &keys, row: p }).map_err(|e| crate::config::UsageError(format!("{name}: {e}")))?;
        results.push(r);
    }

    let mut detail_keys: Vec<&str> = Vec::new();
    for r in &results {
        for k in r.details.keys() {
            if !detail_keys.contains(k) {
                detail_keys.push(k);
            }
        }
    }
    let has_min = results.iter().any(|r| r.minimizer.is_some());
    let mut header: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
    header.push("value".into());
    if has_min {
        header.push("minimizer".into());
    }
    header.extend(detail_keys.iter().map(|k| k.to_string()));
    let rows: Vec<Vec<String>> = points
        .iter()
        .zip(&results)
        .map(|(p, r)| {
            let mut row: Vec<String> = p.iter().map(|x| fmt(*x)).collect();
            row.push(fmt(r.value));
            if has_min {
                row.push(r.minimizer.map_or(String::new(), fmt));
            }
            row.extend(detail_keys.iter().map(|k| r.details.get(*k).map_or(String::new(), |x| fmt(*x))));
            row
        })
        .collect();
    let csv = to_csv(&header, &rows)?;
    print!("{csv}");

    out.write(Format::Csv, &format!("{name}.csv"), &csv)?;
    let json = json!({
        "command": "bounds",
        "name": name,
        "provenance": prov,
        "columns": header,
        "rows": points.iter().zip(&results).map(|(p, r)| json!({
            "params": keys.iter().zip(p).map(|(k, x)| (k.to_string(), json!(x))).collect::<serde_json::Map<_, _>>(),
            "value": r.value,
            "minimizer": r.minimizer,
            "details": r.details,
        })).collect::<Vec<_>>(),
    });
    out.write(Format::Json, &format!("{name}.json"), &serde_json::to_string_pretty(&json)?)?;
    if out.wants(Format::Svg) && out.dir.is_some() {
        // Plot against the first parameter that actually varies.
        match axes.iter().position(|a| a.len() > 1) {
            Some(xi) => {
                let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
                for (p, r) in points.iter().zip(&results) {
                    let label: Vec<String> =
                        keys.iter().zip(p).enumerate().filter(|(i, _)| *i != xi && axes[*i].len() > 1).map(|(_, (k, x))| format!("{k}={x}")).collect();
                    let label = label.join(" ");
                    match series.iter_mut().find(|s| s.0 == label) {
                        Some(s) => s.1.push((p[xi], r.value)),
                        None => series.push((label, vec![(p[xi], r.value)])),
                    }
                }
                let svg = plot::line_plot(&format!("{name} bound"), keys[xi], "bound", &series);
                out.write(Format::Svg, &format!("{name}.svg"), &svg)?;
            }
            None => eprintln!("note: no parameter varies, skipping the plot"),
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(name: &str) -> BoundsArgs {
        BoundsArgs { name: Some(name.into()), ..Default::default() }
    }

    #[test]
    fn every_bound_lists_its_parameters() {
        for id in TheoremId::ALL {
            let keys = params(id);
            let a = BoundsArgs {
                k: Some(Grid::single(-1.0)),
                t: Some(Grid::single(1.0)),
                u: Some(Grid::single(1.0)),
                lu: Some(Grid::single(1.0)),
                delta: Some(Grid::single(1.0)),
                lambda: Some(Grid::single(1.0)),
                ..args(id.as_str())
            };
            let row: Vec<f64> = keys.iter().map(|k| a.grid(k).map(|g| g.values[0]).or(default_of(k)).unwrap()).collect();
            let r = evaluate(id, &Vals { keys: &keys, row: &row }).unwrap();
            assert!(r.value.is_finite() && r.value > 0.0, "{id}: {}", r.value);
        }
    }

    #[test]
    fn defaults_follow_other_parameters() {
        let keys = params(TheoremId::CorEst);
        let mut row: Vec<f64> = keys.iter().map(|k| default_of(k).unwrap_or(2.0)).collect();
        row[0] = -3.0;
        let v = Vals { keys: &keys, row: &row };
        assert_eq!(v.get("K0"), -3.0);
        assert_eq!(v.get("s"), 2.0);
    }
}
