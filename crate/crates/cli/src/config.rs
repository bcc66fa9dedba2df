//! The on-disk run configuration and its merge with command-line flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{CommonArgs, CompareArgs, CurveArgs, DemoArgs, KroneckerArgs, ScanArgs, WitnessArgs};
use crate::CliError;

/// A TOML file with a `[common]` table and one table per subcommand.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub common: CommonArgs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kronecker: Option<KroneckerArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demo41: Option<DemoArgs>,
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::parse(text).map_err(|e| CliError::Config {
            path: origin.to_string(),
            detail: e.to_string(),
        })?;
        serde_path_to_error::deserialize(de).map_err(|e| CliError::Config {
            path: origin.to_string(),
            detail: format!("at `{}`: {}", e.path(), e.inner()),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Usage(format!("cannot write config: {e}")))
    }
}

/// `overlay` on top of `base`: every field set in `overlay` wins, nested
/// tables are merged key by key.
pub fn merge<T>(base: Option<&T>, overlay: &T) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned,
{
    let to_value = |x: &T| serde_json::to_value(x).map_err(|e| CliError::Usage(e.to_string()));
    let mut merged = match base {
        Some(b) => to_value(b)?,
        None => Value::Object(Default::default()),
    };
    overlay_value(&mut merged, to_value(overlay)?);
    serde_json::from_value(merged).map_err(|e| CliError::Usage(e.to_string()))
}

fn overlay_value(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (key, v) in t {
                if v.is_null() {
                    continue;
                }
                match b.get_mut(&key) {
                    Some(slot) => overlay_value(slot, v),
                    None => {
                        b.insert(key, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
