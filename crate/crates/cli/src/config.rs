//! Parameter grids, config-file merging and output files.

use anyhow::{bail, Context as _, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Bad input from the user. Exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

/// One or more values: `x`, `a,b,c`, `start:stop:count` (inclusive, linear)
/// or `log:start:stop:count`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub values: Vec<f64>,
    text: String,
}

impl Grid {
    pub fn single(x: f64) -> Self {
        Self { values: vec![x], text: x.to_string() }
    }
}

fn number(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (log, body) = match s.strip_prefix("log:") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let parts: Vec<&str> = body.split(':').collect();
        let values = match parts.as_slice() {
            [start, stop, count] => {
                let (a, b) = (number(start)?, number(stop)?);
                let n: usize = count.trim().parse().map_err(|_| format!("grid count `{count}` is not a positive integer"))?;
                if n == 0 {
                    return Err("grid count must be at least 1".into());
                }
                if log && !(a > 0.0 && b > 0.0) {
                    return Err(format!("log grid needs positive endpoints, got {a} and {b}"));
                }
                (0..n)
                    .map(|i| {
                        let f = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                        if log {
                            (a.ln() + f * (b.ln() - a.ln())).exp()
                        } else {
                            a + f * (b - a)
                        }
                    })
                    .collect()
            }
            [list] if !log => list.split(',').map(number).collect::<Result<Vec<_>, _>>()?,
            _ => return Err(format!("cannot read grid `{s}`; use x, a,b,c, start:stop:count or log:start:stop:count")),
        };
        Ok(Self { values, text: s.to_string() })
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match Value::deserialize(d)? {
            Value::Number(n) => Ok(Grid::single(n.as_f64().ok_or_else(|| D::Error::custom("bad number"))?)),
            Value::String(s) => s.parse().map_err(D::Error::custom),
            Value::Array(xs) => {
                let values = xs
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| D::Error::custom("grid arrays hold numbers")))
                    .collect::<Result<Vec<_>, _>>()?;
                if values.is_empty() {
                    return Err(D::Error::custom("empty grid"));
                }
                let text = values.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
                Ok(Grid { values, text })
            }
            other => Err(D::Error::custom(format!("expected a number, string or array, got {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Where and how results are written, from the command line or the
/// `out`/`format` keys of the config file.
#[derive(Clone, Debug, Default)]
pub struct Output {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Output {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Writes `name` under the output directory when one is set and the
    /// format is requested.
    pub fn write(&self, format: Format, name: &str, contents: &str) -> Result<Option<PathBuf>> {
        let Some(dir) = &self.dir else { return Ok(None) };
        if !self.wants(format) {
            return Ok(None);
        }
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(Some(path))
    }
}

/// Everything a run was built from, embedded in JSON outputs.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub config_file: Option<PathBuf>,
    pub params: Value,
}

fn read_config(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => usage(format!("config {} must hold a JSON object", path.display())),
        Err(e) => usage(format!("config {}: {e}", path.display())),
    }
}

/// Overlays command-line parameters on the config file and resolves the
/// output settings. Command-line values win; unknown keys are rejected.
pub fn merge<T: Serialize + DeserializeOwned>(
    cli: &T,
    config: Option<&Path>,
    out: Option<PathBuf>,
    formats: &[Format],
) -> Result<(T, Output, Provenance)> {
    let mut base = match config {
        Some(p) => read_config(p)?,
        None => Map::new(),
    };
    let file_out = base.remove("out");
    let file_formats = base.remove("format");
    let Value::Object(overrides) = serde_json::to_value(cli)? else { unreachable!("args serialize to objects") };
    for (k, v) in overrides {
        if !v.is_null() {
            base.insert(k, v);
        }
    }
    let params = Value::Object(base);
    let merged: T = match serde_json::from_value(params.clone()) {
        Ok(m) => m,
        Err(e) => return usage(format!("invalid parameters: {e}")),
    };
    let dir = match (out, file_out) {
        (Some(d), _) => Some(d),
        (None, Some(Value::String(s))) => Some(PathBuf::from(s)),
        (None, Some(other)) => return usage(format!("config key `out` must be a string, got {other}")),
        (None, None) => None,
    };
    let formats = if !formats.is_empty() {
        formats.to_vec()
    } else if let Some(v) = file_formats {
        match serde_json::from_value::<Vec<Format>>(v) {
            Ok(f) => f,
            Err(e) => return usage(format!("config key `format`: {e}")),
        }
    } else {
        vec![Format::Csv, Format::Json]
    };
    Ok((merged, Output { dir, formats }, Provenance { config_file: config.map(Path::to_path_buf), params }))
}

/// Cartesian product of grids, last axis fastest.
pub fn product(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.iter().map(move |x| {
                    let mut row = prefix.clone();
                    row.push(*x);
                    row
                })
            })
            .collect()
    })
}

/// RFC 4180 table.
pub fn to_csv(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn require(value: Option<f64>, name: &str) -> Result<f64> {
    match value {
        Some(v) => Ok(v),
        None => bail!(UsageError(format!("missing parameter --{name}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_forms() {
        assert_eq!("1".parse::<Grid>().unwrap().values, vec![1.0]);
        assert_eq!("1,2.5".parse::<Grid>().unwrap().values, vec![1.0, 2.5]);
        let g: Grid = "0.1:10:50".parse().unwrap();
        assert_eq!(g.values.len(), 50);
        assert_eq!(g.values[0], 0.1);
        assert!((g.values[49] - 10.0).abs() < 1e-12);
        let l: Grid = "log:1:100:3".parse().unwrap();
        assert!((l.values[1] - 10.0).abs() < 1e-12);
        assert!("log:0:1:3".parse::<Grid>().is_err());
        assert!("1:2:0".parse::<Grid>().is_err());
        assert!("a".parse::<Grid>().is_err());
        assert!("log:1,2".parse::<Grid>().is_err());
    }

    #[test]
    fn grid_from_json() {
        let g: Grid = serde_json::from_str("[1, 2]").unwrap();
        assert_eq!(g.values, vec![1.0, 2.0]);
        let g: Grid = serde_json::from_str("\"1:3:3\"").unwrap();
        assert_eq!(g.values, vec![1.0, 2.0, 3.0]);
        assert!(serde_json::from_str::<Grid>("true").is_err());
    }

    #[test]
    fn product_order() {
        let p = product(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(p, vec![vec![1.0, 3.0], vec![1.0, 4.0], vec![2.0, 3.0], vec![2.0, 4.0]]);
    }

    proptest! {
        #[test]
        fn linear_grid_is_monotone_and_hits_endpoints(a in -100.0..100.0f64, w in 0.001..100.0f64, n in 2usize..200) {
            let g: Grid = format!("{a}:{}:{n}", a + w).parse().unwrap();
            prop_assert_eq!(g.values.len(), n);
            prop_assert_eq!(g.values[0], a);
            prop_assert!((g.values[n - 1] - (a + w)).abs() <= 1e-9 * (1.0 + a.abs() + w));
            prop_assert!(g.values.windows(2).all(|p| p[1] > p[0]));
        }
    }
}
