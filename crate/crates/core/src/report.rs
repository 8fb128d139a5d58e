//! Run configuration and machine-readable report documents.
//!
//! Every command emits one JSON document with a versioned schema that
//! embeds the configuration, the catalog verification digest, and the
//! tolerance tier, so reruns with the same config and seed are byte
//! stable.

use crate::catalog::CatalogCheck;
use crate::classify::{SampleConfig, ToleranceTier};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub chart: String,
    pub chart_params: BTreeMap<String, f64>,
    pub nus: Vec<u8>,
    pub t1: f64,
    pub t2: f64,
    pub base_points: usize,
    pub kappas_per_point: usize,
    pub tuples: usize,
    pub seed: u64,
    pub tol_tier: Option<ToleranceTier>,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            chart: "round_sphere".into(),
            chart_params: BTreeMap::new(),
            nus: vec![1, 2, 3, 4],
            t1: 1.0,
            t2: 1.0,
            base_points: SampleConfig::MIN_BASE_POINTS,
            kappas_per_point: SampleConfig::MIN_KAPPAS,
            tuples: SampleConfig::MIN_TUPLES,
            seed: 42,
            tol_tier: None,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn sample_config(&self) -> SampleConfig {
        SampleConfig {
            base_points: self.base_points,
            kappas_per_point: self.kappas_per_point,
            tuples: self.tuples,
            seed: self.seed,
        }
    }
}

/// The JSON envelope shared by every command.
#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: u32,
    pub command: String,
    pub config: RunConfig,
    pub tolerance_tier: ToleranceTier,
    pub catalog_digest: Vec<CatalogCheck>,
    pub results: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(
        command: &str,
        config: RunConfig,
        tier: ToleranceTier,
        digest: Vec<CatalogCheck>,
        results: T,
    ) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            tolerance_tier: tier,
            catalog_digest: digest,
            results,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &str) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// Parse the key-value config format: one `key = value` pair per line,
/// `#` comments. Keys mirror RunConfig; metric components of a custom
/// chart use the expression grammar under keys g11..g44.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value', got '{raw}'",
                lineno + 1
            )));
        };
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Fold config-file entries into a RunConfig; unknown keys are permitted
/// when they describe a custom chart (g11.., domain, orientation, id).
pub fn apply_config(kv: &BTreeMap<String, String>, cfg: &mut RunConfig) -> Result<()> {
    let parse_f64 = |key: &str, v: &String| {
        v.parse::<f64>()
            .map_err(|_| Error::Config(format!("bad number for {key}: '{v}'")))
    };
    for (key, value) in kv {
        match key.as_str() {
            "chart" => cfg.chart = value.clone(),
            "nu" => {
                cfg.nus = value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<u8>()
                            .map_err(|_| Error::Config(format!("bad nu list '{value}'")))
                    })
                    .collect::<Result<_>>()?;
            }
            "t1" => cfg.t1 = parse_f64(key, value)?,
            "t2" => cfg.t2 = parse_f64(key, value)?,
            "base_points" => cfg.base_points = parse_f64(key, value)? as usize,
            "kappas" => cfg.kappas_per_point = parse_f64(key, value)? as usize,
            "tuples" => cfg.tuples = parse_f64(key, value)? as usize,
            "seed" => cfg.seed = parse_f64(key, value)? as u64,
            "tol_tier" => {
                cfg.tol_tier = Some(match value.as_str() {
                    "analytic" => ToleranceTier::Analytic,
                    "fd" | "finite_diff" => ToleranceTier::FiniteDiff,
                    other => {
                        return Err(Error::Config(format!("unknown tol_tier '{other}'")))
                    }
                })
            }
            "out" => cfg.out = Some(value.clone()),
            "radius" | "a" | "b" | "amplitude" | "chart_seed" => {
                cfg.chart_params.insert(key.clone(), parse_f64(key, value)?);
            }
            // Custom-chart keys are consumed by the catalog loader.
            "id" | "domain" | "orientation" => {}
            k if k.starts_with('g') && k.len() == 3 => {}
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_files_parse_and_apply() {
        let text = "\n# a comment\nchart = s2xs2\na = 1.0\nb = 2.0\nnu = 1,3\nt1 = 0.5\nseed = 7\ntol_tier = analytic\n";
        let kv = parse_config_file(text).unwrap();
        let mut cfg = RunConfig::default();
        apply_config(&kv, &mut cfg).unwrap();
        assert_eq!(cfg.chart, "s2xs2");
        assert_eq!(cfg.nus, vec![1, 3]);
        assert_eq!(cfg.t1, 0.5);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.chart_params["a"], 1.0);
    }

    #[test]
    fn malformed_config_lines_are_rejected()  {
        assert!(parse_config_file("chart round_sphere").is_err());
        let kv = parse_config_file("bogus_key = 1").unwrap();
        let mut cfg = RunConfig::default();
        assert!(apply_config(&kv, &mut cfg).is_err());
    }

    #[test]
    fn reports_are_byte_stable() {
        let cfg = RunConfig::default();
        let r1 = Report::new(
            "decompose",
            cfg.clone(),
            ToleranceTier::Analytic,
            vec![],
            vec![1.0, 2.0],
        );
        let r2 = Report::new(
            "decompose",
            cfg,
            ToleranceTier::Analytic,
            vec![],
            vec![1.0, 2.0],
        );
        assert_eq!(r1.to_json().unwrap(), r2.to_json().unwrap());
        assert!(r1.to_json().unwrap().contains("\"schema\": 1"));
    }
}
