//! Declarative run configuration: `key = value` lines plus repeatable
//! `effect = Name [theta]` lines. Command-line flags are applied on top.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every key a config file or `--set` may use.
pub const KEYS: &[&str] = &[
    "graph",
    "directed",
    "outcome",
    "outcome_col",
    "attributes",
    "attr_types",
    "missing",
    "seed",
    "burn_in",
    "interval",
    "samples",
    "initial",
    "resync_every",
    "varied",
    "lo",
    "hi",
    "step",
    "peak_ratio",
    "jump",
    "phase1_samples",
    "subphases",
    "a0",
    "phase2_multiplier",
    "phase3_samples",
    "chain_steps",
    "sa_burn_in",
    "max_runs",
    "t_threshold",
    "divergence_bound",
    "updates",
    "proposals_per_update",
    "c1",
    "epsilon",
    "half_life",
    "replicates",
    "final_samples",
    "suite",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectLine {
    pub name: String,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub values: BTreeMap<String, String>,
    pub effects: Vec<EffectLine>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line: no + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, found `{line}`")))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(cfg)
    }

    /// Sets a key; `effect` appends an effect line.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key == "effect" {
            let mut parts = value.split_whitespace();
            let name = parts
                .next()
                .ok_or_else(|| Error::Config("`effect` needs a name".into()))?
                .to_string();
            let theta = parts
                .next()
                .map(|t| t.parse::<f64>().map_err(|_| Error::Config(format!("bad parameter value `{t}` for {name}"))))
                .transpose()?;
            if let Some(extra) = parts.next() {
                return Err(Error::Config(format!("unexpected `{extra}` after effect {name}")));
            }
            self.effects.push(EffectLine { name, theta });
            return Ok(());
        }
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!(
                "unknown configuration key `{key}`; known keys: effect, {}",
                KEYS.join(", ")
            )));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Parses `key=value` as given to `--set`.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("`--set` expects key=value, got `{pair}`")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`")))
            })
            .transpose()
    }

    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(Error::Config(format!("`{key}` must be true or false, got `{v}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_values_and_effects() {
        let text = "graph = g.edges  # comment\ndirected = true\neffect = Density -1.28\neffect = GWActivity(0.5)\n";
        let cfg = RunConfig::parse(text, Path::new("x.cfg")).unwrap();
        assert_eq!(cfg.get("graph"), Some("g.edges"));
        assert!(cfg.flag("directed").unwrap());
        assert_eq!(cfg.effects.len(), 2);
        assert_eq!(cfg.effects[0].theta, Some(-1.28));
        assert_eq!(cfg.effects[1].theta, None);
    }

    #[test]
    fn rejects_unknown_keys_with_line() {
        let err = RunConfig::parse("\nburnin = 3\n", Path::new("x.cfg")).unwrap_err();
        assert!(err.to_string().contains("x.cfg:2"));
    }
}
