use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::Query;
use crate::error::{Error, Result};
use crate::expr::{parse_mathml, Document, ExprTree};

/// One line of a corpus file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub pmathml: String,
    #[serde(default)]
    pub cmathml: Option<String>,
    #[serde(default)]
    pub uri: Option<String>,
}

impl CorpusRecord {
    pub fn to_document(&self) -> Result<Document> {
        Ok(Document {
            doc_id: self.id.clone(),
            source_uri: self.uri.clone(),
            ptree: parse_mathml(&self.pmathml)?,
            ctree_gold: self.cmathml.as_deref().map(parse_mathml).transpose()?,
            ctree_se: None,
        })
    }

    pub fn from_document(doc: &Document) -> CorpusRecord {
        CorpusRecord {
            id: doc.doc_id.clone(),
            pmathml: doc.ptree.to_xml(),
            cmathml: doc.ctree_gold.as_ref().map(ExprTree::to_xml),
            uri: doc.source_uri.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct QueryRecord {
    id: String,
    pmathml: String,
    #[serde(default)]
    cmathml: Option<String>,
    #[serde(default)]
    note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestConfig {
    /// Documents with more leaves than this are dropped.
    pub max_leaf_nodes: usize,
    /// Ingest aborts when a larger share of records fails to parse.
    pub max_failure_rate: f64,
}

impl Default for IngestConfig {
    fn default() -> IngestConfig {
        IngestConfig {
            max_leaf_nodes: 20,
            max_failure_rate: 0.10,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub records: usize,
    pub kept: usize,
    pub dropped: usize,
    pub failed: usize,
}

/// Reads corpus records, dropping documents over the leaf bound. Records
/// that fail to parse or repeat an id are logged and skipped.
pub fn ingest(reader: impl BufRead, config: &IngestConfig) -> Result<(Vec<Document>, IngestStats)> {
    if config.max_leaf_nodes == 0 {
        return Err(Error::InvalidArgument(
            "max_leaf_nodes must be at least 1".into(),
        ));
    }
    let mut stats = IngestStats::default();
    let mut docs = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        stats.records += 1;
        let parsed = serde_json::from_str::<CorpusRecord>(&line)
            .map_err(Error::from)
            .and_then(|r| r.to_document());
        let doc = match parsed {
            Ok(doc) if !ids.contains(&doc.doc_id) => doc,
            Ok(doc) => {
                log::warn!("line {}: duplicate id `{}`", i + 1, doc.doc_id);
                stats.failed += 1;
                continue;
            }
            Err(e) => {
                log::warn!("line {}: {e}", i + 1);
                stats.failed += 1;
                continue;
            }
        };
        if doc.ptree.leaf_count() > config.max_leaf_nodes {
            stats.dropped += 1;
            continue;
        }
        ids.insert(doc.doc_id.clone());
        stats.kept += 1;
        docs.push(doc);
    }
    if stats.records > 0 && stats.failed as f64 / stats.records as f64 > config.max_failure_rate {
        return Err(Error::TooManyFailures {
            failed: stats.failed,
            total: stats.records,
        });
    }
    Ok((docs, stats))
}

pub fn ingest_file(
    path: impl AsRef<Path>,
    config: &IngestConfig,
) -> Result<(Vec<Document>, IngestStats)> {
    ingest(BufReader::new(File::open(path)?), config)
}

fn json_lines<T: for<'de> Deserialize<'de>>(reader: impl BufRead) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
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

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Format {
        line,
        message: e.to_string(),
    })
}

/// Reads a corpus file strictly: any bad record is an error.
pub fn read_corpus(reader: impl BufRead) -> Result<Vec<Document>> {
    let records: Vec<CorpusRecord> = json_lines(reader)?;
    records
        .iter()
        .enumerate()
        .map(|(i, r)| at_line(i + 1, r.to_document()))
        .collect()
}

pub fn write_corpus(docs: &[Document], mut writer: impl Write) -> Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut writer, &CorpusRecord::from_document(doc))?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads (presentation, content) training pairs; every record needs both.
pub fn read_pairs(reader: impl BufRead) -> Result<Vec<(ExprTree, ExprTree)>> {
    let records: Vec<CorpusRecord> = json_lines(reader)?;
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let c = r.cmathml.as_deref().ok_or_else(|| Error::Format {
                line: i + 1,
                message: format!("record `{}` has no cmathml", r.id),
            })?;
            Ok((
                at_line(i + 1, parse_mathml(&r.pmathml))?,
                at_line(i + 1, parse_mathml(c))?,
            ))
        })
        .collect()
}

pub fn read_queries(reader: impl BufRead) -> Result<Vec<Query>> {
    let records: Vec<QueryRecord> = json_lines(reader)?;
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(Query {
                pmathml: at_line(i + 1, parse_mathml(&r.pmathml))?,
                cmathml: at_line(i + 1, r.cmathml.as_deref().map(parse_mathml).transpose())?,
                id: r.id,
                note: r.note,
            })
        })
        .collect()
}

pub fn write_queries(queries: &[Query], mut writer: impl Write) -> Result<()> {
    for q in queries {
        let record = QueryRecord {
            id: q.id.clone(),
            pmathml: q.pmathml.to_xml(),
            cmathml: q.cmathml.as_ref().map(ExprTree::to_xml),
            note: q.note.clone(),
        };
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}
