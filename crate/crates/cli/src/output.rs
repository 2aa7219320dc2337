use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Identifies a run: tool version, seed, and a hash of every setting and
/// input that affects the output (paths and thread count excluded).
pub struct Meta {
    pub seed: u64,
    pub config_hash: String,
}

impl Meta {
    pub fn new<C: Serialize>(
        command: &str,
        config: &C,
        seed: u64,
        inputs: &[(&str, &[u8])],
    ) -> Self {
        let inputs: serde_json::Map<String, Value> = inputs
            .iter()
            .map(|(name, bytes)| (name.to_string(), Value::String(sha256_hex(bytes))))
            .collect();
        let canonical = json!({
            "command": command,
            "config": config,
            "inputs": inputs,
        });
        let digest = sha256_hex(canonical.to_string().as_bytes());
        Meta {
            seed,
            config_hash: digest[..16].to_string(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tool": "ncw",
            "version": VERSION,
            "seed": self.seed,
            "config_hash": self.config_hash,
        })
    }

    pub fn csv_comment(&self) -> String {
        format!(
            "# ncw {} seed={} config_hash={}\n",
            VERSION, self.seed, self.config_hash
        )
    }
}

/// `value` with a `meta` entry added; `value` must be a JSON object.
pub fn with_meta<T: Serialize>(value: &T, meta: &Meta) -> Result<Value, CliError> {
    let mut v = serde_json::to_value(value).map_err(ncw_core::Error::from)?;
    match v.as_object_mut() {
        Some(obj) => {
            obj.insert("meta".into(), meta.to_json());
            Ok(v)
        }
        None => Err(CliError::Usage("artifact is not a JSON object".into())),
    }
}

pub fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn parse_json<T: serde::de::DeserializeOwned>(
    path: &Path,
    bytes: &[u8],
) -> Result<T, CliError> {
    serde_json::from_slice(bytes)
        .map_err(|e| ncw_core::Error::Format(format!("{}: {e}", path.display())).into())
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| CliError::Io(p.to_path_buf(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))
        }
    }
}

pub fn emit_json(path: Option<&Path>, value: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(ncw_core::Error::from)?;
    s.push('\n');
    emit(path, &s)
}
