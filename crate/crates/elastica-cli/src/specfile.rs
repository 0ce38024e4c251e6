//! JSON spec files: the same parameters as the command's flags, stored
//! flat, with an optional `"command"` key naming the subcommand they are
//! meant for. Unknown keys are rejected so a typo cannot silently fall
//! back to a default.

use std::fs;
use std::path::{Path, PathBuf};

use elastica::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Loads `path` as parameters for `command`; `None` yields the defaults.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>, command: &str) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let bad = |e: &dyn std::fmt::Display| Error::domain(format!("{}: {e}", path.display()));
    let text = fs::read_to_string(path).map_err(|e| bad(&e))?;
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(&e))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| bad(&"spec file must be a JSON object"))?;
    if let Some(c) = obj.remove("command") {
        let c = c
            .as_str()
            .map(str::to_owned)
            .ok_or_else(|| bad(&"\"command\" must be a string"))?;
        if c != command {
            return Err(bad(&format!(
                "spec file is for command {c:?}, invoked as {command:?}"
            )));
        }
    }
    serde_json::from_value(value).map_err(|e| bad(&e))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfunParams {
    pub kmin: Option<f64>,
    pub kmax: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalProfileParams {
    pub k: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyParams {
    #[serde(rename = "J")]
    pub j: Option<Vec<usize>>,
    pub which: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowParams {
    pub initial: Option<String>,
    pub a: Option<f64>,
    pub k: Option<f64>,
    pub m: Option<usize>,
    pub upright: Option<bool>,
    #[serde(rename = "J")]
    pub j: Option<usize>,
    pub dt: Option<f64>,
    pub adaptive: Option<bool>,
    pub t_end: Option<f64>,
    pub out: Option<String>,
    pub stride: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BisectParams {
    #[serde(rename = "J")]
    pub j: Option<usize>,
    pub alo: Option<f64>,
    pub ahi: Option<f64>,
    pub res: Option<f64>,
    pub tmax: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityParams {
    pub panels: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareParams {
    pub snapshot: Option<PathBuf>,
    #[serde(rename = "ref")]
    pub reference: Option<String>,
    pub ref_file: Option<PathBuf>,
}
