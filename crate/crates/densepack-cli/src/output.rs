use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::config::ExperimentConfig;

/// Writes result files into one directory, each tagged with the config.
pub struct Output {
    dir: PathBuf,
    config: Value,
}

impl Output {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let dir = cfg.out_dir();
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output {
            dir,
            config: serde_json::to_value(cfg)?,
        })
    }

    fn write(&self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    /// JSON object with a `config` key added.
    pub fn json(&self, name: &str, mut value: Value) -> Result<PathBuf> {
        if let Value::Object(map) = &mut value {
            map.insert("config".into(), self.config.clone());
        }
        self.write(name, &(serde_json::to_string_pretty(&value)? + "\n"))
    }

    /// CSV preceded by a `# config: {...}` comment line.
    pub fn csv(&self, name: &str, body: &str) -> Result<PathBuf> {
        let text = format!("# config: {}\n{body}", serde_json::to_string(&self.config)?);
        self.write(name, &text)
    }

    /// Plain text with `# config` comment lines first.
    pub fn text(&self, name: &str, body: &str) -> Result<PathBuf> {
        self.csv(name, body)
    }
}
