//! Append-only JSON-lines event logs, one file per session.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Result, ServiceError};
use crate::session::Event;

#[derive(Debug, Clone)]
pub struct EventStore {
    dir: PathBuf,
}

impl EventStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.jsonl"))
    }

    /// Appends one event and syncs it to disk.
    pub fn append(&self, id: &str, event: &Event) -> Result<()> {
        let mut line = serde_json::to_vec(event).map_err(std::io::Error::other)?;
        line.push(b'\n');
        let mut f = OpenOptions::new().create(true).append(true).open(self.path(id))?;
        f.write_all(&line)?;
        f.sync_data()?;
        Ok(())
    }

    /// Events of one session. A torn final line from an interrupted write is
    /// dropped; corruption anywhere else is an error.
    pub fn read(&self, id: &str) -> Result<Vec<Event>> {
        read_log(&self.path(id))
    }

    /// Every session id with a log in the directory.
    pub fn session_ids(&self) -> Result<Vec<String>> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "jsonl") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    ids.push(stem.to_string());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }
}

fn read_log(path: &Path) -> Result<Vec<Event>> {
    let lines: Vec<String> = BufReader::new(File::open(path)?).lines().collect::<std::io::Result<_>>()?;
    let mut events = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(e) => events.push(e),
            Err(_) if i + 1 == lines.len() => break,
            Err(e) => {
                return Err(ServiceError::Storage(std::io::Error::other(format!(
                    "{} line {}: {e}",
                    path.display(),
                    i + 1
                ))))
            }
        }
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let store = EventStore::open(dir.path().join("logs")).unwrap();
        store.append("a", &Event::Cancelled { at_ms: 1 }).unwrap();
        store.append("a", &Event::Queried { ids: vec![3, 1], at_ms: 2 }).unwrap();
        store.append("b", &Event::Cancelled { at_ms: 3 }).unwrap();
        assert_eq!(store.read("a").unwrap(), vec![Event::Cancelled { at_ms: 1 }, Event::Queried { ids: vec![3, 1], at_ms: 2 }]);
        assert_eq!(store.session_ids().unwrap(), ["a", "b"]);
    }

    #[test]
    fn torn_tail_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let store = EventStore::open(dir.path()).unwrap();
        store.append("a", &Event::Cancelled { at_ms: 1 }).unwrap();
        let mut f = OpenOptions::new().append(true).open(dir.path().join("a.jsonl")).unwrap();
        f.write_all(br#"{"type":"queri"#).unwrap();
        assert_eq!(store.read("a").unwrap().len(), 1);
    }

    #[test]
    fn corruption_in_the_middle_fails() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.jsonl"), "garbage\n{\"type\":\"cancelled\",\"at_ms\":1}\n").unwrap();
        let store = EventStore::open(dir.path()).unwrap();
        assert!(store.read("a").is_err());
    }
}
