//! Sidecar records describing how each output file was produced.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};

use nas_landscape::{Error, Result};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    pub space: Option<String>,
    /// Every flag of the invocation, defaults included.
    pub parameters: Value,
    pub notes: Map<String, Value>,
    pub created_unix: u64,
    #[serde(skip)]
    primary: PathBuf,
}

impl RunManifest {
    pub fn new(
        command: &str,
        args: &impl Serialize,
        primary: &Path,
        seed: Option<u64>,
        space: Option<&str>,
    ) -> Self {
        RunManifest {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            inputs: Vec::new(),
            outputs: vec![primary.display().to_string()],
            seed,
            space: space.map(str::to_string),
            parameters: serde_json::to_value(args).unwrap_or(Value::Null),
            notes: Map::new(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            primary: primary.to_path_buf(),
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn note(&mut self, key: &str, value: Value) {
        self.notes.insert(key.into(), value);
    }

    pub fn path_for(primary: &Path) -> PathBuf {
        PathBuf::from(format!("{}.manifest.json", primary.display()))
    }

    pub fn write(&self) -> Result<()> {
        let path = Self::path_for(&self.primary);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text).map_err(|e| Error::from(e).context(path.display().to_string()))
    }
}
