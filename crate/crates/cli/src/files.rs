use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use dekap_core::NetworkInstance;

use crate::error::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Parses a config file; malformed content is a config error.
pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Parses an input data file; malformed content is a validation error.
pub fn read_input<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_bytes(path, to_json(value).as_bytes())
}

/// Reads an instance file and rejects it unless every invariant holds. Each
/// violation is listed in the error message.
pub fn load_instance(path: &Path) -> Result<NetworkInstance, CliError> {
    let text = read_text(path)?;
    let inst = NetworkInstance::from_json_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let violations = inst.validate();
    if violations.is_empty() {
        Ok(inst)
    } else {
        let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        Err(CliError::Validation(format!("{}: invalid instance\n{}", path.display(), lines.join("\n"))))
    }
}
