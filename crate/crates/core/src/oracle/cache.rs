use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Oracle answers keyed by "generator@seed/oracle", persisted as JSON so
/// slow exact values are computed once per fixture.
#[derive(Debug, Default)]
pub struct OracleCache {
    path: Option<PathBuf>,
    values: BTreeMap<String, u64>,
    dirty: bool,
}

impl OracleCache {
    pub fn in_memory() -> Self {
        OracleCache::default()
    }

    /// Loads `path` if it exists; a missing file starts an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let values = match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(OracleCache { path: Some(path), values, dirty: false })
    }

    pub fn get_or_compute(&mut self, fixture: &str, seed: u64, oracle: &str, compute: impl FnOnce() -> Result<u64>) -> Result<u64> {
        let key = format!("{fixture}@{seed}/{oracle}");
        if let Some(&v) = self.values.get(&key) {
            return Ok(v);
        }
        let v = compute()?;
        self.values.insert(key, v);
        self.dirty = true;
        Ok(v)
    }

    pub fn save(&mut self) -> Result<()> {
        if let (Some(path), true) = (&self.path, self.dirty) {
            std::fs::write(path, serde_json::to_string_pretty(&self.values)?)?;
            self.dirty = false;
        }
        Ok(())
    }
}
