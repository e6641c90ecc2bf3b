//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use jiggle_core::model::{reduce, Beta, FieldStatistics, PhysicalParams, ReducedParams};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("key '{0}' given twice")]
    Duplicate(String),
    #[error("bad value for '{key}': {msg}")]
    Value { key: String, msg: String },
}

/// Every key the CLI understands.
pub const KEYS: &[&str] = &[
    "gamma",
    "omega0",
    "omega_i",
    "omega_m",
    "beta",
    "stats",
    "tol",
    "flo_tol_rel",
    "tau_min",
    "tau_grid",
    "omega_grid",
    "chi_grid",
    "beta_grid",
    "tau",
    "r0",
    "v0",
    "t_end",
    "dt",
    "n_samples",
    "model",
    "suppress_runaway",
    "complex",
    "cr",
    "zeros",
    "contour_x",
    "contour_y0",
    "contour_y",
    "contour_points",
    "refine",
];

#[derive(Debug, Clone, Default)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let k = k.trim();
            if s.0.contains_key(k) {
                return Err(ConfigError::Duplicate(k.to_string()));
            }
            s.set(k, v.trim())?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Insert or override a key; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        self.0.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e: T::Err| bad(key, e.to_string())),
        }
    }

    pub fn grid(&self, key: &str, default: &str) -> Result<Vec<f64>, ConfigError> {
        parse_grid(self.raw(key).unwrap_or(default)).map_err(|m| bad(key, m))
    }

    pub fn betas(&self, key: &str, default: &str) -> Result<Vec<Beta>, ConfigError> {
        self.raw(key)
            .unwrap_or(default)
            .split(',')
            .map(|b| b.parse::<Beta>().map_err(|e| bad(key, e.to_string())))
            .collect()
    }
}

fn bad(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        msg: msg.into(),
    }
}

/// `a,b,c`, `linspace:a:b:n`, `logspace:a:b:n` or `symlog:a:b:n` (`±logspace`).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number"));
    let parts: Vec<&str> = spec.split(':').collect();
    let out = match parts.as_slice() {
        [kind, a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| format!("'{n}' is not a count"))?;
            if n < 2 {
                return Err("grids need at least 2 points".into());
            }
            let lin = |i: usize| i as f64 / (n - 1) as f64;
            match kind.trim() {
                "linspace" => (0..n).map(|i| a + (b - a) * lin(i)).collect(),
                "logspace" | "symlog" => {
                    if !(a > 0.0 && b > a) {
                        return Err("logspace needs 0 < a < b".into());
                    }
                    let (la, lb) = (a.log10(), b.log10());
                    let pos: Vec<f64> = (0..n).map(|i| 10f64.powf(la + (lb - la) * lin(i))).collect();
                    if kind.trim() == "symlog" {
                        pos.iter().rev().map(|w| -w).chain(pos.iter().copied()).collect()
                    } else {
                        pos
                    }
                }
                other => return Err(format!("unknown grid kind '{other}'")),
            }
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("cannot parse grid '{spec}'")),
    };
    if out.is_empty() || out.iter().any(|v| !v.is_finite()) {
        return Err("grid must be nonempty and finite".into());
    }
    Ok(out)
}

/// Validated physical inputs shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct Physics {
    pub physical: PhysicalParams,
    pub reduced: ReducedParams,
    pub stats: FieldStatistics,
    pub tol: f64,
}

impl Physics {
    pub fn from_settings(s: &Settings) -> Result<Self, ConfigError> {
        let beta: Beta = s.get("beta", Beta::Finite(10.0))?;
        let physical = PhysicalParams {
            gamma: s.get("gamma", 0.1)?,
            omega0: s.get("omega0", 1.0)?,
            omega_i: s.get("omega_i", 1.0)?,
            omega_m: s.get("omega_m", 1.0)?,
            beta,
        };
        physical
            .validate()
            .map_err(|e| bad("physical parameters", e.to_string()))?;
        let reduced = reduce(&physical).map_err(|e| bad("physical parameters", e.to_string()))?;
        let stats: FieldStatistics = s.get("stats", FieldStatistics::Quantum)?;
        let tol: f64 = s.get("tol", 1e-8)?;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(bad("tol", "must lie in (0, 1)"));
        }
        Ok(Physics {
            physical,
            reduced,
            stats,
            tol,
        })
    }

    /// Statistics and temperature must be compatible.
    pub fn check_stats(&self) -> Result<(), ConfigError> {
        self.stats
            .check(self.reduced.beta_omega_i)
            .map_err(|e| bad("stats", e.to_string()))
    }
}
