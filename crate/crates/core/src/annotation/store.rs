use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use super::AnnotationRecord;
use crate::error::{Error, Result};

/// Append-only newline-delimited JSON log of annotation records with an
/// in-memory index of the newest record per scan.
///
/// Appends go through a single writer lock and the index is updated while
/// that lock is held, so readers see either the previous or the new latest
/// record.
#[derive(Debug)]
pub struct AnnotationStore {
    path: PathBuf,
    writer: Mutex<File>,
    latest: RwLock<HashMap<String, AnnotationRecord>>,
}

impl AnnotationStore {
    /// Opens (creating if needed) the log at `path` and rebuilds the index.
    /// A trailing partial line left by an interrupted write is cut off.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let complete = text.rfind('\n').map_or(0, |i| i + 1);
        let latest = index_lines(&text[..complete])?;

        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        if complete < text.len() {
            log::warn!(
                "{}: dropping {} bytes of an incomplete trailing record",
                path.display(),
                text.len() - complete
            );
            file.set_len(complete as u64).map_err(|e| Error::io(&path, e))?;
        }
        Ok(Self {
            path,
            writer: Mutex::new(file),
            latest: RwLock::new(latest),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Validates and durably appends `record`; it becomes the latest record
    /// for its scan.
    pub fn append(&self, record: AnnotationRecord) -> Result<AnnotationRecord> {
        record.validate()?;
        let mut line = serde_json::to_string(&record).expect("record serializes");
        line.push('\n');
        let mut file = self.writer.lock().expect("annotation writer poisoned");
        file.write_all(line.as_bytes())
            .and_then(|_| file.sync_data())
            .map_err(|e| Error::io(&self.path, e))?;
        self.latest
            .write()
            .expect("annotation index poisoned")
            .insert(record.scan_id.clone(), record.clone());
        Ok(record)
    }

    pub fn latest(&self, scan_id: &str) -> Option<AnnotationRecord> {
        self.latest
            .read()
            .expect("annotation index poisoned")
            .get(scan_id)
            .cloned()
    }

    /// Newest record of every annotated scan, keyed by scan id.
    pub fn snapshot(&self) -> BTreeMap<String, AnnotationRecord> {
        self.latest
            .read()
            .expect("annotation index poisoned")
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    /// Reads the newest record per scan without opening the log for writing.
    pub fn read_latest(path: impl AsRef<Path>) -> Result<BTreeMap<String, AnnotationRecord>> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let complete = text.rfind('\n').map_or(0, |i| i + 1);
        Ok(index_lines(&text[..complete])?.into_iter().collect())
    }
}

fn index_lines(text: &str) -> Result<HashMap<String, AnnotationRecord>> {
    let mut latest = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: AnnotationRecord =
            serde_json::from_str(line).map_err(|e| Error::Schema(format!("annotation log line {}: {e}", i + 1)))?;
        latest.insert(record.scan_id.clone(), record);
    }
    Ok(latest)
}
