use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{Grade, Qrels};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub query_id: String,
    pub doc_id: String,
    pub grade: Grade,
    /// RFC 3339, UTC.
    pub timestamp: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotator: Option<String>,
}

impl JudgmentRecord {
    pub fn now(query_id: &str, doc_id: &str, grade: Grade, annotator: Option<String>) -> Self {
        JudgmentRecord {
            query_id: query_id.to_string(),
            doc_id: doc_id.to_string(),
            grade,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            annotator,
        }
    }
}

/// What a writer believes the stored grade to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Any,
    Unjudged,
    Grade(Grade),
}

/// Append-only JSON Lines log of judgments. The latest record for a
/// (query, document) pair wins. Writes go through one lock.
#[derive(Debug)]
pub struct JudgmentLog {
    path: PathBuf,
    writer: Mutex<()>,
}

impl JudgmentLog {
    pub fn open(path: impl Into<PathBuf>) -> JudgmentLog {
        JudgmentLog {
            path: path.into(),
            writer: Mutex::new(()),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn records(&self) -> Result<Vec<JudgmentRecord>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(&line).map_err(|e| Error::Format {
                line: i + 1,
                message: e.to_string(),
            })?);
        }
        Ok(out)
    }

    pub fn current(&self, query_id: &str, doc_id: &str) -> Result<Option<Grade>> {
        Ok(self
            .records()?
            .into_iter()
            .rev()
            .find(|r| r.query_id == query_id && r.doc_id == doc_id)
            .map(|r| r.grade))
    }

    pub fn append(&self, record: &JudgmentRecord) -> Result<()> {
        self.append_checked(record, Expect::Any)
    }

    /// Appends unless the stored grade differs from `expect`.
    pub fn append_checked(&self, record: &JudgmentRecord, expect: Expect) -> Result<()> {
        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        if expect != Expect::Any {
            let current = self.current(&record.query_id, &record.doc_id)?;
            let ok = match expect {
                Expect::Unjudged => current.is_none(),
                Expect::Grade(g) => current == Some(g),
                Expect::Any => true,
            };
            if !ok {
                return Err(Error::Conflict(format!(
                    "{}/{} is currently {}",
                    record.query_id,
                    record.doc_id,
                    current.map_or("unjudged".to_string(), |g| g.to_string())
                )));
            }
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        file.write_all(line.as_bytes())?;
        file.sync_data()?;
        Ok(())
    }

    /// `base` overlaid with every logged judgment in order.
    pub fn compile(&self, base: &Qrels) -> Result<Qrels> {
        let mut qrels = base.clone();
        for r in self.records()? {
            qrels.insert(&r.query_id, &r.doc_id, r.grade);
        }
        Ok(qrels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn last_write_wins_and_conflicts() {
        let dir = tempfile::tempdir().unwrap();
        let log = JudgmentLog::open(dir.path().join("j.jsonl"));
        assert!(log.records().unwrap().is_empty());

        log.append(&JudgmentRecord::now("q1", "d1", Grade::Relevant, None))
            .unwrap();
        log.append(&JudgmentRecord::now(
            "q1",
            "d1",
            Grade::Partial,
            Some("ann".into()),
        ))
        .unwrap();
        assert_eq!(log.current("q1", "d1").unwrap(), Some(Grade::Partial));

        let qrels = log.compile(&Qrels::new()).unwrap();
        assert_eq!(qrels.get("q1", "d1"), Some(Grade::Partial));

        let r = JudgmentRecord::now("q1", "d1", Grade::NonRelevant, None);
        assert!(matches!(
            log.append_checked(&r, Expect::Grade(Grade::Relevant)),
            Err(Error::Conflict(_))
        ));
        assert!(matches!(
            log.append_checked(&r, Expect::Unjudged),
            Err(Error::Conflict(_))
        ));
        log.append_checked(&r, Expect::Grade(Grade::Partial))
            .unwrap();
        assert_eq!(log.records().unwrap().len(), 3);
    }
}
