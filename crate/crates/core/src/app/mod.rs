//! Corpus ingestion, per-mode index builds, on-disk layout and the judgment
//! log behind the command line and HTTP front ends.

pub mod bundled;
mod corpus;
mod judgments;

use std::env;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use corpus::{
    ingest, ingest_file, read_corpus, read_pairs, read_queries, write_corpus, write_queries,
    CorpusRecord, IngestConfig, IngestStats,
};
pub use judgments::{Expect, JudgmentLog, JudgmentRecord};

use crate::encoder::encode_document;
use crate::engine::{Engine, Mode, Query};
use crate::enrich::{cross_convert, extract_rules, Enricher, RuleSet};
use crate::error::{Error, Result};
use crate::eval::Qrels;
use crate::expr::{Document, ExprTree};
use crate::index::{build_index, load_index, save_index, Index};

pub const DATA_ENV: &str = "MATHSEEK_DATA";
pub const DEFAULT_DATA_DIR: &str = "mathseek-data";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildReport {
    pub mode: Mode,
    pub indexed: usize,
    /// Documents left out, with the reason.
    pub skipped: Vec<(String, String)>,
}

/// Fills `ctree_se` for every document from `rules`.
pub fn enrich_documents(docs: &mut [Document], rules: &RuleSet) {
    let enricher = Enricher::new(rules);
    for doc in docs {
        doc.ctree_se = Some(enricher.apply(&doc.ptree).ctree);
    }
}

/// Fills `ctree_se` without letting a document's own gold content shape its
/// conversion: documents with gold content are converted by `k`-fold
/// cross-conversion, the rest with rules from every gold pair.
pub fn enrich_documents_held_out(docs: &mut [Document], k: usize) -> Result<()> {
    let gold: Vec<usize> = (0..docs.len())
        .filter(|&i| docs[i].ctree_gold.is_some())
        .collect();
    let pairs: Vec<(ExprTree, ExprTree)> = gold
        .iter()
        .map(|&i| (docs[i].ptree.clone(), docs[i].ctree_gold.clone().unwrap()))
        .collect();
    let converted = cross_convert(&pairs, k)?;
    for (&i, (_, result)) in gold.iter().zip(converted) {
        docs[i].ctree_se = Some(result.ctree);
    }
    if gold.len() < docs.len() {
        let rules = extract_rules(&pairs);
        let enricher = Enricher::new(&rules);
        for doc in docs.iter_mut().filter(|d| d.ctree_gold.is_none()) {
            doc.ctree_se = Some(enricher.apply(&doc.ptree).ctree);
        }
    }
    Ok(())
}

/// Builds the index for `mode`. SE documents without a converted tree are
/// converted with `rules` on the fly; CMathML documents without gold content
/// are skipped.
pub fn build_mode(docs: &[Document], mode: Mode, rules: &RuleSet) -> Result<(Index, BuildReport)> {
    let enricher = Enricher::new(rules);
    let mut entries = Vec::with_capacity(docs.len());
    let mut skipped = Vec::new();
    for doc in docs {
        let terms = match mode {
            Mode::PMathML => encode_document(&doc.ptree),
            Mode::SE => match &doc.ctree_se {
                Some(t) => encode_document(t),
                None => encode_document(&enricher.apply(&doc.ptree).ctree),
            },
            Mode::CMathML => match &doc.ctree_gold {
                Some(t) => encode_document(t),
                None => {
                    log::warn!(
                        "{}: no content markup, left out of the cmathml index",
                        doc.doc_id
                    );
                    skipped.push((doc.doc_id.clone(), "no content markup".to_string()));
                    continue;
                }
            },
        };
        entries.push((doc.doc_id.clone(), terms));
    }
    let index = build_index(entries)?;
    let report = BuildReport {
        mode,
        indexed: index.num_docs(),
        skipped,
    };
    Ok((index, report))
}

/// On-disk layout of one engine instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataDir {
    root: PathBuf,
}

impl DataDir {
    pub fn new(root: impl Into<PathBuf>) -> DataDir {
        DataDir { root: root.into() }
    }

    /// An explicit directory wins, then `MATHSEEK_DATA`, then the default.
    pub fn resolve(explicit: Option<PathBuf>) -> DataDir {
        let root = explicit
            .or_else(|| env::var_os(DATA_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR));
        DataDir::new(root)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.root.join("corpus.jsonl")
    }

    pub fn rules_path(&self) -> PathBuf {
        self.root.join("rules.json")
    }

    pub fn index_path(&self, mode: Mode) -> PathBuf {
        self.root.join(format!("index-{}.idx", mode.name()))
    }

    pub fn judgments_path(&self) -> PathBuf {
        self.root.join("judgments.jsonl")
    }

    pub fn queries_path(&self) -> PathBuf {
        self.root.join("queries.jsonl")
    }

    pub fn qrels_path(&self) -> PathBuf {
        self.root.join("qrels.tsv")
    }

    pub fn create(&self) -> Result<()> {
        fs::create_dir_all(&self.root)?;
        Ok(())
    }

    pub fn save_corpus(&self, docs: &[Document]) -> Result<()> {
        self.create()?;
        let tmp = self.corpus_path().with_extension("tmp");
        write_corpus(docs, BufWriter::new(File::create(&tmp)?))?;
        fs::rename(tmp, self.corpus_path())?;
        Ok(())
    }

    pub fn load_corpus(&self) -> Result<Vec<Document>> {
        read_corpus(BufReader::new(File::open(self.corpus_path())?))
    }

    /// The stored rule set, or an empty one when none was extracted.
    pub fn load_rules(&self) -> Result<RuleSet> {
        let path = self.rules_path();
        if path.exists() {
            RuleSet::load(path)
        } else {
            Ok(RuleSet::new())
        }
    }

    /// Stored queries, falling back to the bundled set.
    pub fn load_queries(&self) -> Result<Vec<Query>> {
        let path = self.queries_path();
        if path.exists() {
            read_queries(BufReader::new(File::open(path)?))
        } else {
            bundled::queries()
        }
    }

    /// Stored base judgments, falling back to the bundled set.
    pub fn load_base_qrels(&self) -> Result<Qrels> {
        let path = self.qrels_path();
        if path.exists() {
            Qrels::from_tsv(BufReader::new(File::open(path)?))
        } else {
            bundled::qrels()
        }
    }

    pub fn judgments(&self) -> JudgmentLog {
        JudgmentLog::open(self.judgments_path())
    }

    /// Base judgments overlaid with the judgment log.
    pub fn qrels(&self) -> Result<Qrels> {
        self.judgments().compile(&self.load_base_qrels()?)
    }

    /// Builds and stores one mode's index. `cv_folds` switches SE to held-out
    /// conversion of the corpus's own gold pairs instead of the stored rules.
    pub fn build(&self, mode: Mode, cv_folds: Option<usize>) -> Result<BuildReport> {
        let mut docs = self.load_corpus()?;
        let rules = self.load_rules()?;
        if mode == Mode::SE {
            if let Some(k) = cv_folds {
                enrich_documents_held_out(&mut docs, k)?;
            }
        }
        let (index, report) = build_mode(&docs, mode, &rules)?;
        save_index(&index, self.index_path(mode))?;
        Ok(report)
    }

    pub fn load_index(&self, mode: Mode) -> Result<Index> {
        let path = self.index_path(mode);
        if !path.exists() {
            return Err(Error::MissingMode(mode.name().to_string()));
        }
        load_index(path)
    }

    /// An engine over every index present on disk.
    pub fn load_engine(&self) -> Result<Engine> {
        let mut engine = Engine::new(self.load_rules()?);
        for mode in Mode::ALL {
            if self.index_path(mode).exists() {
                engine.insert_index(mode, self.load_index(mode)?);
            }
        }
        Ok(engine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_mathml;

    fn doc(id: &str, p: &str, c: Option<&str>) -> Document {
        Document {
            doc_id: id.to_string(),
            source_uri: None,
            ptree: parse_mathml(p).unwrap(),
            ctree_gold: c.map(|c| parse_mathml(c).unwrap()),
            ctree_se: None,
        }
    }

    fn three() -> Vec<Document> {
        vec![
            doc(
                "a",
                "<math><mi>x</mi></math>",
                Some("<math><ci>x</ci></math>"),
            ),
            doc("b", "<math><mi>y</mi></math>", None),
            doc(
                "c",
                "<math><mn>1</mn></math>",
                Some("<math><cn>1</cn></math>"),
            ),
        ]
    }

    #[test]
    fn build_per_mode() {
        let docs = three();
        let (p, _) = build_mode(&docs, Mode::PMathML, &RuleSet::new()).unwrap();
        assert_eq!(p.num_docs(), 3);

        let (c, report) = build_mode(&docs, Mode::CMathML, &RuleSet::new()).unwrap();
        assert_eq!(c.num_docs(), 2);
        assert_eq!(report.skipped.len(), 1);

        let (se, _) = build_mode(&docs, Mode::SE, &RuleSet::new()).unwrap();
        assert_eq!(se.num_docs(), 3);
        assert!(se
            .terms(crate::encoder::Field::Opaths)
            .any(|t| t == r"csymbol#mi\#x"));
    }

    #[test]
    fn data_dir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let data = DataDir::new(dir.path());
        data.save_corpus(&three()).unwrap();
        assert_eq!(data.load_corpus().unwrap(), three());
        data.build(Mode::PMathML, None).unwrap();
        let engine = data.load_engine().unwrap();
        assert_eq!(engine.modes().collect::<Vec<_>>(), [Mode::PMathML]);
        assert!(matches!(
            data.load_index(Mode::SE),
            Err(Error::MissingMode(_))
        ));
    }
}
