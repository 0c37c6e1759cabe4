//! JSON documents for instances, scenarios and provenance sidecars.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::IoError;
use crate::genlab::{DynamicScenario, GenParams, GENERATOR_VERSION};
use crate::model::{Aircraft, AircraftType, RepairJob, StaticInstance, Trade, Wave};

pub const INSTANCE_VERSION: &str = "repairshop-instance/1";
pub const SCENARIO_VERSION: &str = "repairshop-scenario/1";
pub const PROVENANCE_VERSION: &str = "repairshop-provenance/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct InstanceDoc {
    version: String,
    types: Vec<AircraftType>,
    #[serde(default)]
    aircraft: Vec<Aircraft>,
    trades: Vec<Trade>,
    waves: Vec<Wave>,
    jobs: Vec<RepairJob>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ScenarioDoc {
    version: String,
    #[serde(flatten)]
    scenario: DynamicScenario,
}

fn check_version(found: &str, expected: &'static str) -> Result<(), IoError> {
    if found == expected {
        Ok(())
    } else {
        Err(IoError::Version { found: found.to_string(), expected })
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn instance_to_json(instance: &StaticInstance) -> String {
    to_pretty(&InstanceDoc {
        version: INSTANCE_VERSION.into(),
        types: instance.types.clone(),
        aircraft: instance.aircraft.clone(),
        trades: instance.trades.clone(),
        waves: instance.waves.clone(),
        jobs: instance.jobs.clone(),
    })
}

/// Parses an instance document. The result is not validated.
pub fn instance_from_json(text: &str) -> Result<StaticInstance, IoError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    check_version(&doc.version, INSTANCE_VERSION)?;
    Ok(StaticInstance::new(doc.types, doc.aircraft, doc.trades, doc.waves, doc.jobs)?)
}

pub fn scenario_to_json(scenario: &DynamicScenario) -> String {
    to_pretty(&ScenarioDoc { version: SCENARIO_VERSION.into(), scenario: scenario.clone() })
}

pub fn scenario_from_json(text: &str) -> Result<DynamicScenario, IoError> {
    let doc: ScenarioDoc = serde_json::from_str(text)?;
    check_version(&doc.version, SCENARIO_VERSION)?;
    Ok(doc.scenario)
}

/// Sidecar describing how an output file was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub version: String,
    pub tool_version: String,
    pub generator_version: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GenParams>,
    /// Resolved configuration as flat key/value pairs.
    #[serde(default)]
    pub config: serde_json::Map<String, serde_json::Value>,
}

impl Provenance {
    pub fn new(seed: u64, params: Option<GenParams>) -> Self {
        Self {
            version: PROVENANCE_VERSION.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            generator_version: GENERATOR_VERSION.into(),
            seed,
            params,
            config: Default::default(),
        }
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

/// `dir/instance.json` -> `dir/instance.provenance.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    path.with_file_name(format!("{stem}.provenance.json"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn read_instance(path: &Path) -> Result<StaticInstance, IoError> {
    instance_from_json(&std::fs::read_to_string(path)?)
}

pub fn read_scenario(path: &Path) -> Result<DynamicScenario, IoError> {
    scenario_from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genlab::{gen_dynamic, gen_static};

    #[test]
    fn instance_round_trip() {
        let inst = gen_static(&GenParams::static_suite(8, 2, 3, 1)).unwrap();
        let text = instance_to_json(&inst);
        assert!(text.starts_with("{\n  \"version\": \"repairshop-instance/1\""));
        for key in ["\"types\"", "\"trades\"", "\"waves\"", "\"jobs\"", "\"processingTime\""] {
            assert!(text.contains(key), "{key}");
        }
        assert_eq!(instance_from_json(&text).unwrap(), inst);
    }

    #[test]
    fn wrong_version_rejected() {
        let inst = gen_static(&GenParams::static_suite(8, 2, 3, 1)).unwrap();
        let text = instance_to_json(&inst).replace("instance/1", "instance/9");
        assert!(matches!(instance_from_json(&text), Err(IoError::Version { .. })));
    }

    #[test]
    fn scenario_round_trip() {
        let s = gen_dynamic(&GenParams::dynamic_suite(10, 2)).unwrap();
        assert_eq!(scenario_from_json(&scenario_to_json(&s)).unwrap(), s);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("a/b.json")), PathBuf::from("a/b.provenance.json"));
    }
}
