use std::path::Path;

use dekap_core::netgen::{generate_instance, GenConfig};
use dekap_core::NetworkInstance;

use crate::error::CliError;
use crate::files::{read_config, write_bytes};

/// Reads a generator config. `seed` may be omitted from the file when one is
/// given on the command line; the command-line seed always wins.
pub fn load_gen_config(path: &Path, seed: Option<u64>) -> Result<GenConfig, CliError> {
    let mut value: serde_json::Value = read_config(path)?;
    if let (Some(seed), Some(obj)) = (seed, value.as_object_mut()) {
        obj.insert("seed".into(), seed.into());
    }
    serde_json::from_value(value).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn run_gen(config: &Path, out: &Path, seed: Option<u64>) -> Result<NetworkInstance, CliError> {
    let cfg = load_gen_config(config, seed)?;
    let inst = generate_instance(&cfg)?;
    let mut text = inst.to_json_string()?;
    text.push('\n');
    write_bytes(out, text.as_bytes())?;
    println!(
        "wrote {} ({} agents, {} tasks, {} levels, seed {})",
        out.display(),
        inst.n_agents,
        inst.n_tasks,
        inst.n_levels,
        cfg.seed
    );
    Ok(inst)
}
