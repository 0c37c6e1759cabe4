//! Flat TOML option files and the resolved configuration embedded in outputs.
//!
//! Keys are the long flag names (`lambda-shift = 0.1`). A value comes from the
//! flag if given, else the file, else the built-in default. The seed falls back
//! to `REPAIRSHOP_SEED` before its default of 0.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SEED_ENV: &str = "REPAIRSHOP_SEED";

/// Every key any subcommand understands.
const KNOWN_KEYS: &[&str] = &[
    "aircraft",
    "budget",
    "capacity",
    "count",
    "coverage",
    "deterioration",
    "horizon-factor",
    "hybrid",
    "jobs",
    "lambda-shift",
    "late",
    "mode",
    "out",
    "policies",
    "reps",
    "schedulers",
    "seed",
    "shop-fraction",
    "solver",
    "solvers",
    "summarize",
    "summary",
    "trace",
    "trades",
    "variant",
    "wave",
    "waves",
];

#[derive(Debug, Default)]
pub struct FileConfig {
    table: toml::Table,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.message().to_string())?;
        for (key, value) in &table {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("unknown key `{key}`"));
            }
            let flat = match value {
                toml::Value::Table(_) => false,
                toml::Value::Array(items) => items.iter().all(|v| !matches!(v, toml::Value::Table(_) | toml::Value::Array(_))),
                _ => true,
            };
            if !flat {
                return Err(format!("key `{key}` must hold a scalar or a list of scalars"));
            }
        }
        Ok(Self { table })
    }

    fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(v) => v
                .clone()
                .try_into()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))),
        }
    }
}

/// Collects the value chosen for every option of one command.
pub struct Resolver<'a> {
    file: &'a FileConfig,
    resolved: Map<String, Value>,
}

impl<'a> Resolver<'a> {
    pub fn new(file: &'a FileConfig, command: &str) -> Self {
        let mut resolved = Map::new();
        resolved.insert("command".into(), Value::from(command));
        Self { file, resolved }
    }

    fn record<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).expect("option values serialize");
        self.resolved.insert(key.into(), v);
    }

    pub fn pick<T: DeserializeOwned + Serialize>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        let value = match flag {
            Some(v) => v,
            None => self.file.get(key)?.unwrap_or(default),
        };
        self.record(key, &value);
        Ok(value)
    }

    /// Comma-separated list; the file may give a string or an array.
    pub fn pick_list(&mut self, key: &str, flag: Option<String>, default: &str) -> Result<Vec<String>, CliError> {
        let raw = match flag {
            Some(v) => v,
            None => match self.file.table.get(key) {
                None => default.to_string(),
                Some(toml::Value::Array(items)) => items
                    .iter()
                    .map(|v| v.as_str().map(str::to_string).ok_or_else(|| CliError::Usage(format!("config key `{key}`: expected strings"))))
                    .collect::<Result<Vec<_>, _>>()?
                    .join(","),
                Some(_) => self.file.get::<String>(key)?.unwrap_or_default(),
            },
        };
        let list: Vec<String> = raw.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect();
        if list.is_empty() {
            return Err(CliError::Usage(format!("`{key}` must list at least one entry")));
        }
        self.record(key, &list);
        Ok(list)
    }

    pub fn seed(&mut self, flag: Option<u64>) -> Result<u64, CliError> {
        let seed = match flag {
            Some(s) => s,
            None => match self.file.get::<u64>("seed")? {
                Some(s) => s,
                None => match std::env::var(SEED_ENV) {
                    Ok(v) => v
                        .trim()
                        .parse()
                        .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?,
                    Err(_) => 0,
                },
            },
        };
        self.record("seed", &seed);
        Ok(seed)
    }

    pub fn finish(self) -> Map<String, Value> {
        self.resolved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = FileConfig::parse("reps = 4\npolicies = [\"P11\", \"P33\"]\nbudget = 2.5\n").unwrap();
        let mut r = Resolver::new(&file, "sim");
        assert_eq!(r.pick("reps", None, 20u64).unwrap(), 4);
        assert_eq!(r.pick("budget", Some(1.0), 5.0).unwrap(), 1.0);
        assert_eq!(r.pick_list("policies", None, "P31").unwrap(), ["P11", "P33"]);
        assert_eq!(r.pick("wave", None, 28usize).unwrap(), 28);
        let map = r.finish();
        assert_eq!(map["reps"], 4);
        assert_eq!(map["budget"], 1.0);
        assert_eq!(map["command"], "sim");
    }

    #[test]
    fn nested_and_unknown_keys_rejected() {
        assert!(FileConfig::parse("[sim]\nreps = 3\n").is_err());
        assert!(FileConfig::parse("replications = 3\n").is_err());
    }

    #[test]
    fn wrong_type_is_a_usage_error() {
        let file = FileConfig::parse("reps = \"many\"\n").unwrap();
        let mut r = Resolver::new(&file, "sim");
        assert!(matches!(r.pick("reps", None, 1u64), Err(CliError::Usage(_))));
    }
}
