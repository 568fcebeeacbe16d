//! Digest-keyed transcript store: one JSON record per file, named by digest.

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use super::GatewayError;

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct TranscriptRecord {
    pub digest: String,
    pub purpose_tag: String,
    pub response_text: String,
    pub timestamp: u64,
}

pub struct TranscriptStore {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

impl TranscriptStore {
    /// Open (creating if needed) a transcript directory.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, GatewayError> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir, write_lock: Mutex::new(()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn record_path(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.json"))
    }

    pub fn lookup(&self, digest: &str) -> Result<Option<TranscriptRecord>, GatewayError> {
        let path = self.record_path(digest);
        if !path.exists() {
            return Ok(None);
        }
        let bytes = std::fs::read(&path)?;
        let rec: TranscriptRecord = serde_json::from_slice(&bytes)
            .map_err(|e| GatewayError::StoreUnavailable(format!("{}: {e}", path.display())))?;
        Ok(Some(rec))
    }

    /// Persist a record. Records are immutable: a second put with the same
    /// digest leaves the first record in place.
    pub fn put(&self, digest: &str, purpose_tag: &str, response_text: &str) -> Result<(), GatewayError> {
        let _guard = self.write_lock.lock().unwrap();
        let path = self.record_path(digest);
        if path.exists() {
            return Ok(());
        }
        let rec = TranscriptRecord {
            digest: digest.to_string(),
            purpose_tag: purpose_tag.to_string(),
            response_text: response_text.to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let tmp = self.dir.join(format!(".{digest}.tmp"));
        std::fs::write(&tmp, serde_json::to_vec_pretty(&rec).expect("record serializes"))?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Number of stored records.
    pub fn len(&self) -> usize {
        std::fs::read_dir(&self.dir)
            .map(|rd| {
                rd.filter_map(Result::ok)
                    .filter(|e| e.path().extension().is_some_and(|x| x == "json"))
                    .count()
            })
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
