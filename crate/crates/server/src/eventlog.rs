//! Append-only event log: one JSON record per line, flushed per append so
//! the log is complete up to the last acknowledged action even if the
//! process dies mid-run.

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    pub kind: String,
    pub payload: Value,
}

pub const EVENT_REGISTER: &str = "register";
/// Any delivered envelope: text, order proposal, or payment notice.
pub const EVENT_MESSAGE: &str = "message";
pub const EVENT_PAYMENT: &str = "payment";

enum Sink {
    Null,
    Memory(Mutex<Vec<EventRecord>>),
    File(Mutex<File>),
}

pub struct EventLog {
    sink: Sink,
    next_seq: AtomicU64,
}

impl EventLog {
    pub fn null() -> Self {
        EventLog { sink: Sink::Null, next_seq: AtomicU64::new(1) }
    }

    pub fn in_memory() -> Self {
        EventLog {
            sink: Sink::Memory(Mutex::new(Vec::new())),
            next_seq: AtomicU64::new(1),
        }
    }

    pub fn to_file(path: &Path) -> std::io::Result<Self> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let file = OpenOptions::new().create(true).truncate(true).write(true).open(path)?;
        Ok(EventLog {
            sink: Sink::File(Mutex::new(file)),
            next_seq: AtomicU64::new(1),
        })
    }

    pub fn append(&self, kind: &str, payload: Value) {
        let record = EventRecord {
            seq: self.next_seq.fetch_add(1, Ordering::SeqCst),
            kind: kind.to_string(),
            payload,
        };
        match &self.sink {
            Sink::Null => {}
            Sink::Memory(records) => records.lock().push(record),
            Sink::File(file) => {
                let mut line = serde_json::to_vec(&record).expect("event records serialize");
                line.push(b'\n');
                let mut file = file.lock();
                // A failed write must not take the market down mid-run.
                if let Err(e) = file.write_all(&line).and_then(|()| file.flush()) {
                    tracing::error!("event log write failed: {e}");
                }
            }
        }
    }

    pub fn flush(&self) {
        if let Sink::File(file) = &self.sink {
            let _ = file.lock().flush();
        }
    }

    /// Records captured so far (memory sink only).
    pub fn memory_records(&self) -> Option<Vec<EventRecord>> {
        match &self.sink {
            Sink::Memory(records) => Some(records.lock().clone()),
            _ => None,
        }
    }
}

/// Read a line-delimited event log back into records.
pub fn read_event_log(path: &Path) -> std::io::Result<Vec<EventRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: EventRecord = serde_json::from_str(&line)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn file_log_round_trips_and_is_ordered() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run").join("events.ldjson");
        let log = EventLog::to_file(&path).unwrap();
        log.append(EVENT_REGISTER, json!({"agent_name": "c001"}));
        log.append(EVENT_MESSAGE, json!({"text": "hello"}));
        log.flush();

        let records = read_event_log(&path).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].seq, 1);
        assert_eq!(records[1].seq, 2);
        assert_eq!(records[0].kind, EVENT_REGISTER);
    }

    #[test]
    fn memory_log_captures_records() {
        let log = EventLog::in_memory();
        log.append(EVENT_PAYMENT, json!({"amount_cents": 100}));
        let records = log.memory_records().unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].kind, EVENT_PAYMENT);
    }
}
