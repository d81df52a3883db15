use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};

/// Where a scenario drops its files. `discard()` keeps every check runnable
/// without touching the filesystem.
#[derive(Debug)]
pub struct Artifacts {
    dir: Option<PathBuf>,
    prefix: String,
    pub written: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: PathBuf, prefix: &str) -> Result<Self> {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: Some(dir), prefix: prefix.to_string(), written: vec![] })
    }

    pub fn discard() -> Self {
        Self { dir: None, prefix: String::new(), written: vec![] }
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }

    pub fn path(&self, suffix: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.{suffix}", self.prefix)))
    }

    /// Writes `<prefix>.<suffix>` through `body`; a no-op when discarding.
    pub fn write(&mut self, suffix: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
        let Some(path) = self.path(suffix) else { return Ok(()) };
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        body(&mut w).and_then(|_| w.flush()).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path.file_name().unwrap().to_string_lossy().into_owned());
        Ok(())
    }

    /// Registers a file some other writer produced at `self.path(suffix)`.
    pub fn record(&mut self, suffix: &str) {
        if let Some(p) = self.path(suffix) {
            self.written.push(p.file_name().unwrap().to_string_lossy().into_owned());
        }
    }

    pub fn json(&mut self, suffix: &str, value: &serde_json::Value) -> Result<()> {
        self.write(suffix, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
            writeln!(w)
        })
    }
}
