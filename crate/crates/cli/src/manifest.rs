use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Record of one run, sufficient to replay it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// Arguments after the program name, without `--manifest`.
    pub command_line: Vec<String>,
    pub version: String,
    pub command: String,
    pub seeds: Vec<u64>,
    pub workers: Option<usize>,
    pub wall_time_seconds: f64,
    pub params: Value,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}

/// `args` with any `--manifest PATH` or `--manifest=PATH` removed.
pub fn strip_manifest_flag(args: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut skip = false;
    for arg in args {
        if skip {
            skip = false;
        } else if arg == "--manifest" {
            skip = true;
        } else if !arg.starts_with("--manifest=") {
            out.push(arg.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_flag_is_removed() {
        let args: Vec<String> = [
            "simulate",
            "--manifest",
            "m.json",
            "--n",
            "5",
            "--manifest=x",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(strip_manifest_flag(&args), ["simulate", "--n", "5"]);
    }
}
