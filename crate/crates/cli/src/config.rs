//! Run configuration: one JSON document binding the pipeline parameters,
//! the simulated sensor rig, and evaluation options. Unknown keys are
//! rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use gtforge_core::error::{Error, Result};
use gtforge_core::pipeline::PipelineConfig;
use gtforge_core::sim::SensorRig;
use gtforge_core::traj::ApeOptions;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub pipeline: PipelineConfig,
    pub rig: SensorRig,
    pub eval: ApeOptions,
}

impl RunConfig {
    /// Loads and validates a config file; `None` yields the defaults.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let config = match path {
            None => RunConfig::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|_| Error::MissingInput(path.to_path_buf()))?;
                serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!(
                    "config {}: {e}",
                    path.display()
                )))?
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        self.rig.validate()?;
        if self.eval.max_dt < 0.0 {
            return Err(Error::InvalidArgument("eval.max_dt must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Reads `report.json` if it exists, lets `update` mutate it as a JSON
/// object, and writes it back with sorted keys (deterministic bytes).
pub fn merge_into_report(
    path: &Path,
    update: impl FnOnce(&mut serde_json::Map<String, serde_json::Value>),
) -> Result<()> {
    let mut root = if path.exists() {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?
    } else {
        serde_json::Value::Object(Default::default())
    };
    let Some(map) = root.as_object_mut() else {
        return Err(Error::Parse {
            path: path.display().to_string(),
            msg: "report root is not a JSON object".into(),
        });
    };
    update(map);
    let text = serde_json::to_string_pretty(&root).expect("report serializes");
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn to_json_value<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("value serializes")
}
