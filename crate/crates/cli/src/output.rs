//! File writers. Results never carry timestamps; those live in `provenance.json`.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub struct OutputDir {
    pub root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.text(name, &text)
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.root.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.root.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Writes `config.txt` and `provenance.json`; call last.
    pub fn finish(mut self, command: &str, config: &RunConfig) -> Result<Vec<String>> {
        self.text("config.txt", &config.to_text())?;
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let prov = Provenance {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config_hash: config.hash(),
            seed: config.seed,
            created_unix: created,
            threads: rayon::current_num_threads(),
            files: self.written.clone(),
        };
        self.json("provenance.json", &prov)?;
        Ok(self.written)
    }
}

#[derive(Serialize)]
struct Provenance<'a> {
    command: &'a str,
    version: &'a str,
    config_hash: String,
    seed: u64,
    created_unix: u64,
    threads: usize,
    files: Vec<String>,
}

/// Shortest round-trip text for a float.
pub fn num(x: f64) -> String {
    x.to_string()
}
