use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A registered face scan available for annotation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub scan_id: String,
    pub scan_mesh_path: PathBuf,
    pub display_name: String,
}

/// The scans of a manifest, in manifest order, with unique ids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScanCatalog {
    entries: Vec<ScanEntry>,
}

impl ScanCatalog {
    pub fn new(entries: Vec<ScanEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            // ids double as output file stems
            let safe = e
                .scan_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
            if e.scan_id.is_empty() || e.scan_id.starts_with('.') || !safe {
                return Err(Error::InvariantViolation(format!(
                    "scan_id {:?} must be non-empty [A-Za-z0-9._-] not starting with '.'",
                    e.scan_id
                )));
            }
            if !seen.insert(e.scan_id.as_str()) {
                return Err(Error::InvariantViolation(format!(
                    "duplicate scan_id {:?} in manifest",
                    e.scan_id
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Loads a manifest (a JSON list of entries). Relative mesh paths resolve
    /// against the manifest directory and every mesh must exist.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut entries: Vec<ScanEntry> = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for e in &mut entries {
            if e.scan_mesh_path.is_relative() {
                e.scan_mesh_path = base.join(&e.scan_mesh_path);
            }
            if !e.scan_mesh_path.is_file() {
                return Err(Error::FileNotFound(e.scan_mesh_path.clone()));
            }
        }
        Self::new(entries)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(&self.entries).expect("entries serialize") + "\n";
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn entries(&self) -> &[ScanEntry] {
        &self.entries
    }

    pub fn get(&self, scan_id: &str) -> Result<&ScanEntry> {
        self.entries
            .iter()
            .find(|e| e.scan_id == scan_id)
            .ok_or_else(|| Error::UnknownScan(scan_id.to_string()))
    }

    pub fn contains(&self, scan_id: &str) -> bool {
        self.entries.iter().any(|e| e.scan_id == scan_id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
