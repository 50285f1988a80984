use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::output::{Report, Table, SCHEMA_VERSION};
use crate::{commands, Cli, Command};

/// A finished run: enough to re-execute it and compare the payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub command: String,
    /// Arguments after the program name, without `--manifest`.
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub payload: Value,
}

impl RunManifest {
    pub fn new(cmd: &Command, args: Vec<String>, report: &Report, wall: Duration) -> Self {
        let seed = match cmd {
            Command::Volume { field, .. }
            | Command::Verify { field, .. }
            | Command::Audit { field, .. }
            | Command::Index { field, .. } => field.seed(),
            Command::Optimize { seed, .. } => Some(*seed),
            _ => None,
        };
        Self {
            schema: SCHEMA_VERSION,
            command: report.command.to_string(),
            args,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: wall.as_secs_f64(),
            payload: report.payload.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")
            .with_context(|| format!("cannot write manifest {}", path.display()))
    }
}

/// Drops `--manifest <path>` and `--manifest=<path>` so a replay does not
/// overwrite the manifest it reads.
pub fn replayable_args(args: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--manifest" {
            skip = true;
        } else if !a.starts_with("--manifest=") {
            out.push(a.clone());
        }
    }
    out
}

pub fn replay(path: &Path) -> anyhow::Result<Report> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read manifest {}", path.display()))?;
    let m: RunManifest = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a run manifest", path.display()))?;
    if m.schema != SCHEMA_VERSION {
        bail!("manifest schema {} is not supported (expected {SCHEMA_VERSION})", m.schema);
    }
    let cli = Cli::try_parse_from(std::iter::once("spherevol".to_string()).chain(m.args.iter().cloned()))
        .context("manifest arguments no longer parse")?;
    if matches!(cli.command, Command::Replay { .. }) {
        bail!("a manifest cannot replay another manifest");
    }
    let report = commands::execute(&cli.command)?;
    let stored = serde_json::to_string(&m.payload)?;
    let fresh = serde_json::to_string(&report.payload)?;
    if stored != fresh {
        bail!("replayed payload differs from the manifest");
    }
    let payload = json!({
        "manifest": path.display().to_string(),
        "replayed_command": m.command,
        "args": m.args,
        "matches": true,
    });
    Ok(Report {
        command: "replay",
        table: Table::key_values(&payload),
        payload,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_flag_is_stripped() {
        let args: Vec<String> = ["--manifest", "m.json", "volume", "--field", "canonical:1", "--manifest=x"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(replayable_args(&args), ["volume", "--field", "canonical:1"]);
    }
}
