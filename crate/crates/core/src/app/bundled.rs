//! Fixture data compiled into the library: the fifteen evaluation queries
//! plus one ambiguity query, a small judged corpus, and a parallel
//! presentation/content corpus for rule extraction.
//!
//! Queries `q4` and `a1` are the same function written two ways
//! (`arcsin(x)` and `sin^-1(x)`) and share one content form.

use crate::engine::Query;
use crate::error::Result;
use crate::eval::Qrels;
use crate::expr::{Document, ExprTree};

use super::{read_corpus, read_pairs, read_queries};

pub const QUERIES: &str = include_str!("../../data/queries.jsonl");
pub const CORPUS: &str = include_str!("../../data/minicorpus.jsonl");
pub const QRELS: &str = include_str!("../../data/qrels.tsv");
pub const PARALLEL: &str = include_str!("../../data/parallel.jsonl");

/// Ids of the queries written in more than one presentation.
pub const AMBIGUITY_QUERIES: [&str; 2] = ["q4", "a1"];

pub fn queries() -> Result<Vec<Query>> {
    read_queries(QUERIES.as_bytes())
}

pub fn corpus() -> Result<Vec<Document>> {
    read_corpus(CORPUS.as_bytes())
}

pub fn qrels() -> Result<Qrels> {
    Qrels::from_tsv(QRELS.as_bytes())
}

pub fn parallel() -> Result<Vec<(ExprTree, ExprTree)>> {
    read_pairs(PARALLEL.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_loads() {
        let q = queries().unwrap();
        assert_eq!(q.len(), 16);
        assert!((1..=15).all(|i| q.iter().any(|x| x.id == format!("q{i}"))));
        assert!(q.iter().all(|x| x.cmathml.is_some()));
        let docs = corpus().unwrap();
        assert!(docs.iter().all(|d| d.ptree.leaf_count() <= 20));
        let qrels = qrels().unwrap();
        for (qid, doc) in [("q4", "d015"), ("a1", "d016")] {
            assert!(qrels.get(qid, doc).is_some());
        }
        assert!(parallel().unwrap().len() >= 60);
    }
}
