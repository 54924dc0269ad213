use std::path::{Path, PathBuf};

use callout_core::datagen::GeneratorManifest;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Settings a run resolved from its flags, environment and config files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[serde(default)]
    pub distance_matrix: bool,
    pub inputs: Vec<String>,
    pub threads: usize,
}

/// Wall-clock phases in microseconds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub load_us: u64,
    pub run_us: u64,
    pub write_us: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ResolvedConfig,
    pub timings: Timings,
    pub distance_calls: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations_used: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorManifest>,
}

impl RunManifest {
    pub fn new(command: &str, config: ResolvedConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            timings: Timings::default(),
            distance_calls: 0,
            iterations_used: None,
            generator: None,
        }
    }

    /// Sidecar path next to an output file: `out.json` -> `out.json.manifest.json`.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn write_next_to(&self, output: &Path) -> CliResult<()> {
        let path = Self::path_for(output);
        std::fs::write(&path, self.to_json() + "\n").map_err(CliError::file(&path))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::file(path))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_path() {
        assert_eq!(
            RunManifest::path_for(Path::new("out/r.json")),
            PathBuf::from("out/r.json.manifest.json")
        );
    }

    #[test]
    fn round_trip() {
        let mut m = RunManifest::new(
            "detect",
            ResolvedConfig {
                iterations: Some(10),
                capacity: Some(32),
                metric: Some("euclidean".into()),
                inputs: vec!["data.csv".into()],
                threads: 3,
                ..Default::default()
            },
        );
        m.timings.run_us = 12_345;
        m.distance_calls = u64::MAX;
        m.iterations_used = Some(4);
        let back: RunManifest = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
