//! Append-only audit log.

use super::AuditError;
use chrono::{DateTime, Utc};
use fs2::FileExt;
use serde::{Deserialize, Serialize};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AuditStatus {
    Started,
    Success,
    Failure,
}

/// One pipeline step event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub timestamp: DateTime<Utc>,
    pub user_id: String,
    pub event_type: String,
    pub step_name: String,
    pub status: AuditStatus,
    pub layer: String,
    pub comments: String,
    /// Set when this record's timestamp ran behind the previous line; the
    /// record is kept, not dropped.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub clock_skew: bool,
}

impl AuditRecord {
    pub fn now(
        user_id: impl Into<String>,
        event_type: impl Into<String>,
        step_name: impl Into<String>,
        status: AuditStatus,
        layer: impl Into<String>,
        comments: impl Into<String>,
    ) -> Self {
        AuditRecord {
            timestamp: Utc::now(),
            user_id: user_id.into(),
            event_type: event_type.into(),
            step_name: step_name.into(),
            status,
            layer: layer.into(),
            comments: comments.into(),
            clock_skew: false,
        }
    }
}

/// Append-only log handle holding the advisory writer lock.
///
/// Writes never touch prior content: the file is opened in append mode and
/// each record is one `write_all` followed by `sync_data`, so a record is
/// durable before `append` returns.
pub struct AuditLog {
    path: PathBuf,
    file: File,
    last_timestamp: Option<DateTime<Utc>>,
}

/// Share one writer across worker threads.
pub type SharedAuditLog = Arc<Mutex<AuditLog>>;

impl AuditLog {
    /// Open (creating if needed) and take the advisory lock. A second writer
    /// on the same path fails with `LockHeld`.
    pub fn open(path: &Path) -> Result<AuditLog, AuditError> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|source| AuditError::Io {
                    path: parent.to_path_buf(),
                    source,
                })?;
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .read(true)
            .open(path)
            .map_err(|source| AuditError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        file.try_lock_exclusive()
            .map_err(|_| AuditError::LockHeld {
                path: path.to_path_buf(),
            })?;
        let last_timestamp = read_last_timestamp(path);
        Ok(AuditLog {
            path: path.to_path_buf(),
            file,
            last_timestamp,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Serialize the record as one NDJSON line, write it, and make it
    /// durable. A timestamp running behind the previous line is written with
    /// the skew flag set rather than dropped.
    pub fn append(&mut self, mut record: AuditRecord) -> Result<(), AuditError> {
        if let Some(last) = self.last_timestamp {
            if record.timestamp < last {
                record.clock_skew = true;
            }
        }
        let mut line =
            serde_json::to_string(&record).map_err(|e| AuditError::Serialize(e.to_string()))?;
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.sync_data())
            .map_err(|source| AuditError::Io {
                path: self.path.clone(),
                source,
            })?;
        self.last_timestamp = Some(
            self.last_timestamp
                .map_or(record.timestamp, |last| last.max(record.timestamp)),
        );
        Ok(())
    }

    pub fn into_shared(self) -> SharedAuditLog {
        Arc::new(Mutex::new(self))
    }
}

fn read_last_timestamp(path: &Path) -> Option<DateTime<Utc>> {
    let file = File::open(path).ok()?;
    let mut last = None;
    for line in BufReader::new(file).lines().map_while(Result::ok) {
        if let Ok(record) = serde_json::from_str::<AuditRecord>(&line) {
            last = Some(record.timestamp);
        }
    }
    last
}

/// Read every intact record of a log file.
pub fn read_log(path: &Path) -> Result<Vec<AuditRecord>, AuditError> {
    let file = File::open(path).map_err(|source| AuditError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|source| AuditError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str::<AuditRecord>(&line)
            .map_err(|e| AuditError::Serialize(format!("corrupt line: {e}")))?;
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(step: &str) -> AuditRecord {
        AuditRecord::now("tester", "step", step, AuditStatus::Success, "core", "")
    }

    #[test]
    fn two_appends_two_lines_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("audit.ndjson");
        let mut log = AuditLog::open(&path).unwrap();
        log.append(record("one")).unwrap();
        log.append(record("two")).unwrap();
        drop(log);
        let records = read_log(&path).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].step_name, "one");
        assert_eq!(records[1].step_name, "two");
    }

    #[test]
    fn reopen_appends_never_truncates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("audit.ndjson");
        {
            let mut log = AuditLog::open(&path).unwrap();
            log.append(record("first")).unwrap();
        }
        let before = std::fs::read(&path).unwrap();
        {
            let mut log = AuditLog::open(&path).unwrap();
            log.append(record("second")).unwrap();
        }
        let after = std::fs::read(&path).unwrap();
        assert!(after.starts_with(&before), "log must be append-only");
        assert_eq!(read_log(&path).unwrap().len(), 2);
    }

    #[test]
    fn second_writer_is_locked_out() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("audit.ndjson");
        let _held = AuditLog::open(&path).unwrap();
        match AuditLog::open(&path) {
            Err(AuditError::LockHeld { .. }) => {}
            other => panic!("expected lock error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn clock_skew_flagged_not_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("audit.ndjson");
        let mut log = AuditLog::open(&path).unwrap();
        let mut r1 = record("ahead");
        r1.timestamp = Utc::now() + chrono::Duration::seconds(60);
        log.append(r1).unwrap();
        log.append(record("behind")).unwrap();
        drop(log);
        let records = read_log(&path).unwrap();
        assert_eq!(records.len(), 2);
        assert!(!records[0].clock_skew);
        assert!(records[1].clock_skew);
    }

    #[test]
    fn concurrent_workers_through_one_writer() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("audit.ndjson");
        let log = AuditLog::open(&path).unwrap().into_shared();
        let mut handles = Vec::new();
        for worker in 0..4 {
            let log = Arc::clone(&log);
            handles.push(std::thread::spawn(move || {
                for i in 0..50 {
                    let mut guard = log.lock().unwrap();
                    guard.append(record(&format!("w{worker}-{i}"))).unwrap();
                }
            }));
        }
        for handle in handles {
            handle.join().unwrap();
        }
        drop(log);
        let records = read_log(&path).unwrap();
        assert_eq!(records.len(), 200);
    }
}
