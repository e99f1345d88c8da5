use std::path::Path;

use anyhow::{anyhow, Context, Result};
use cox_core::TwoChannelParams;
use serde_json::{Map, Value};

use crate::args::ParamArgs;

/// Parsed config file, or an empty object without one.
#[derive(Debug, Clone)]
pub struct Config {
    pub root: Value,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let root = match path {
            None => Value::Object(Map::new()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
                if !v.is_object() {
                    return Err(anyhow!("{}: top level must be a JSON object", p.display()));
                }
                v
            }
        };
        Ok(Self { root })
    }

    /// The `params` object if present, otherwise the top level.
    pub fn params_object(&self) -> &Value {
        self.root.get("params").unwrap_or(&self.root)
    }

    pub fn f64_at(obj: &Value, key: &str) -> Result<Option<f64>> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| anyhow!("config field `{key}` must be a number")),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        Self::f64_at(&self.root, key)
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        match self.root.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|x| Some(x as usize))
                .ok_or_else(|| anyhow!("config field `{key}` must be a non-negative integer")),
        }
    }

    pub fn str(&self, key: &str) -> Result<Option<&str>> {
        match self.root.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| anyhow!("config field `{key}` must be a string")),
        }
    }

    pub fn has_params(&self, flags: &ParamArgs) -> bool {
        let o = self.params_object();
        flags.alpha1.is_some() || o.get("alpha1").is_some()
    }

    /// Two-channel parameters from `params_object()`, flags taking precedence.
    pub fn two_channel(&self, flags: &ParamArgs) -> Result<TwoChannelParams> {
        two_channel_from(self.params_object(), flags)
    }
}

pub fn two_channel_from(obj: &Value, flags: &ParamArgs) -> Result<TwoChannelParams> {
    let get = |flag: Option<f64>, key: &str| -> Result<f64> {
        match flag {
            Some(x) => Ok(x),
            None => {
                Config::f64_at(obj, key)?.ok_or_else(|| anyhow!("missing parameter `{key}` (config field or --{key})"))
            }
        }
    };
    Ok(TwoChannelParams::new(
        get(flags.alpha1, "alpha1")?,
        get(flags.alpha2, "alpha2")?,
        get(flags.beta, "beta")?,
        get(flags.delta, "delta")?,
        get(flags.kappa1, "kappa1")?,
    )?)
}

/// Flag value, else config field, else an error naming both.
pub fn required(flag: Option<f64>, cfg: &Config, key: &str) -> Result<f64> {
    match flag {
        Some(x) => Ok(x),
        None => cfg
            .f64(key)?
            .ok_or_else(|| anyhow!("missing `{key}` (config field or --{})", key.replace('_', "-"))),
    }
}
