use std::path::{Path, PathBuf};

use jsa_forge::io::envelope;
use jsa_forge::Result;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cli::Command;

/// Everything needed to reproduce a run. Written into every output.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
    pub verbosity: u8,
    /// The arguments as given, defaults filled in.
    pub args: Value,
    /// Values derived from the arguments: grids, r and s from a model, θ in
    /// radians and so on.
    pub resolved: Map<String, Value>,
}

impl RunConfig {
    pub fn new(command: &Command, verbosity: u8) -> Result<Self> {
        let args = match serde_json::to_value(command)? {
            Value::Object(mut m) => m.remove(command.name()).unwrap_or(Value::Null),
            other => other,
        };
        let seed = match command {
            Command::Optimize(a) => Some(a.seed),
            _ => None,
        };
        Ok(Self {
            command: command.name(),
            version: jsa_forge::VERSION,
            seed,
            outputs: Vec::new(),
            verbosity,
            args,
            resolved: Map::new(),
        })
    }

    pub fn resolve(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.resolved
            .insert(key.into(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn to_value(&self) -> Result<Value> {
        Ok(serde_json::to_value(self)?)
    }

    /// The JSON document for `payload`, with this config attached.
    pub fn document<T: Serialize>(&self, key: &str, payload: &T) -> Result<String> {
        let doc = envelope(key, payload, &self.to_value()?)?;
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    /// Writes the document to `path`, or to stdout without one.
    pub fn emit<T: Serialize>(&self, path: Option<&Path>, key: &str, payload: &T) -> Result<()> {
        let text = self.document(key, payload)?;
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

/// Short stdout summary for commands that write files.
pub fn summary(fields: Value) -> String {
    let mut v = json!({});
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, fields) {
        dst.extend(src);
    }
    serde_json::to_string(&v).unwrap_or_default()
}
