use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Stage {
    pub name: String,
    pub seconds: f64,
}

/// Record of one CLI run, written as `manifest.json` in the output directory.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<Artifact>,
    pub stages: Vec<Stage>,
    pub stats: Vec<(String, f64)>,
    pub outputs: Vec<Artifact>,
    /// Outputs whose content varies between runs (timings); not hashed.
    pub volatile: Vec<String>,
    #[serde(skip)]
    dir: PathBuf,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: &str, dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs: Vec::new(),
            stages: Vec::new(),
            stats: Vec::new(),
            outputs: Vec::new(),
            volatile: Vec::new(),
            dir: dir.to_path_buf(),
        })
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(Artifact {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    pub fn stage(&mut self, name: &str, started: Instant) {
        self.stages.push(Stage {
            name: name.to_string(),
            seconds: started.elapsed().as_secs_f64(),
        });
    }

    pub fn note(&mut self, key: &str, value: f64) {
        self.stats.push((key.to_string(), value));
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let p = self.dir.join(name);
        fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
        self.outputs.push(Artifact {
            path: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    pub fn write_volatile(&mut self, name: &str, contents: &str) -> Result<()> {
        let p = self.dir.join(name);
        fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
        self.volatile.push(name.to_string());
        Ok(())
    }

    pub fn stage_seconds(&self, name: &str) -> Option<f64> {
        self.stages.iter().find(|s| s.name == name).map(|s| s.seconds)
    }

    pub fn finish(&self) -> Result<PathBuf> {
        let p = self.dir.join("manifest.json");
        fs::write(&p, serde_json::to_string_pretty(self)?).with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}
