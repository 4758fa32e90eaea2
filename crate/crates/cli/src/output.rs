use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::CliError;

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    input: String,
    input_sha256: String,
    seed: u64,
    version: &'static str,
    wall_time_s: f64,
    outputs: Vec<String>,
}

/// Collects output files for one run and writes the manifest last.
pub struct Run {
    command: &'static str,
    input: PathBuf,
    digest: String,
    seed: u64,
    out: PathBuf,
    started: Instant,
    outputs: Vec<String>,
}

impl Run {
    pub fn start(command: &'static str, input: &Path, bytes: &[u8], seed: u64, out: &Path) -> Result<Run, CliError> {
        fs::create_dir_all(out).map_err(|e| CliError::data(format!("creating {}: {e}", out.display())))?;
        Ok(Run {
            command,
            input: input.to_path_buf(),
            digest: hex::encode(Sha256::digest(bytes)),
            seed,
            out: out.to_path_buf(),
            started: Instant::now(),
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::data(format!("writing {}: {e}", path.display())))?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::data(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    text.push(',');
                }
                write!(text, "{v:.16e}").expect("writing to a string");
            }
            text.push('\n');
        }
        self.write(name, &text)
    }

    pub fn finish(self) -> Result<(), CliError> {
        let manifest = RunManifest {
            command: self.command,
            input: self.input.display().to_string(),
            input_sha256: self.digest,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::data(e.to_string()))?;
        text.push('\n');
        let path = self.out.join("manifest.json");
        fs::write(&path, text).map_err(|e| CliError::data(format!("writing {}: {e}", path.display())))
    }
}
