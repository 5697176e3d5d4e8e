//! Inverted index over fielded terms with TF-IDF dismax ranking.
//!
//! A term's weight in one field of one document is
//!
//! ```text
//! sqrt(tf) * idf^2 * boost / sqrt(field_length),  idf = 1 + ln(N / (df + 1))
//! ```
//!
//! A document's score sums, over distinct query tokens, the best field
//! weight times the token's query frequency, then multiplies by the share
//! of distinct query tokens the document matched.

mod persist;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

pub use persist::{load_index, save_index, FORMAT_VERSION};

use crate::encoder::{Field, FieldedTerms};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    /// Ordinal of the document; ordinals follow ascending `doc_id`.
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub doc_id: String,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    doc_ids: Vec<String>,
    field_lengths: Vec<[u32; 3]>,
    postings: [HashMap<String, Vec<Posting>>; 3],
    boosts: [f64; 3],
}

impl Default for Index {
    fn default() -> Index {
        Index {
            doc_ids: Vec::new(),
            field_lengths: Vec::new(),
            postings: Default::default(),
            boosts: [1.0; 3],
        }
    }
}

/// Builds an index. Document ids must be unique.
pub fn build_index(mut docs: Vec<(String, FieldedTerms)>) -> Result<Index> {
    docs.sort_by(|a, b| a.0.cmp(&b.0));
    if let Some(w) = docs.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDoc(w[0].0.clone()));
    }
    let mut index = Index::default();
    for (ordinal, (doc_id, terms)) in docs.into_iter().enumerate() {
        let mut lengths = [0u32; 3];
        for field in Field::ALL {
            lengths[field.index()] = terms.token_count(field) as u32;
            let postings = &mut index.postings[field.index()];
            for (term, tf) in terms.counts(field) {
                postings.entry(term.to_string()).or_default().push(Posting {
                    doc: ordinal as u32,
                    tf,
                });
            }
        }
        index.doc_ids.push(doc_id);
        index.field_lengths.push(lengths);
    }
    Ok(index)
}

/// Distinct query tokens pooled over all query fields, with their total
/// frequency, in ascending token order.
pub fn query_tokens(query: &FieldedTerms) -> BTreeMap<&str, u32> {
    let mut tokens = BTreeMap::new();
    for field in Field::ALL {
        for t in query.tokens(field) {
            *tokens.entry(t).or_insert(0) += 1;
        }
    }
    tokens
}

impl Index {
    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn boosts(&self) -> [f64; 3] {
        self.boosts
    }

    pub fn with_boosts(mut self, boosts: [f64; 3]) -> Index {
        self.boosts = boosts;
        self
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<u32> {
        self.doc_ids
            .binary_search_by(|d| d.as_str().cmp(doc_id))
            .ok()
            .map(|i| i as u32)
    }

    pub fn postings(&self, field: Field, term: &str) -> &[Posting] {
        self.postings[field.index()]
            .get(term)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn doc_freq(&self, field: Field, term: &str) -> usize {
        self.postings(field, term).len()
    }

    pub fn term_freq(&self, field: Field, term: &str, doc_id: &str) -> u32 {
        let Some(ord) = self.ordinal(doc_id) else {
            return 0;
        };
        let postings = self.postings(field, term);
        postings
            .binary_search_by_key(&ord, |p| p.doc)
            .map(|i| postings[i].tf)
            .unwrap_or(0)
    }

    pub fn field_length(&self, doc_id: &str, field: Field) -> u32 {
        self.ordinal(doc_id)
            .map(|o| self.field_lengths[o as usize][field.index()])
            .unwrap_or(0)
    }

    pub fn terms(&self, field: Field) -> impl Iterator<Item = &str> {
        self.postings[field.index()].keys().map(String::as_str)
    }

    pub fn idf(&self, field: Field, term: &str) -> f64 {
        idf(self.num_docs(), self.doc_freq(field, term))
    }

    /// Weight of `term` in `field` of document `doc_id`; zero when absent.
    pub fn score_term(&self, term: &str, field: Field, doc_id: &str) -> f64 {
        let tf = self.term_freq(field, term, doc_id);
        if tf == 0 {
            return 0.0;
        }
        let df = self.doc_freq(field, term);
        let len = self.field_length(doc_id, field);
        term_weight(tf, df, self.num_docs(), len, self.boosts[field.index()])
    }

    /// Top `k` documents by score, ties by ascending `doc_id`. Documents
    /// scoring zero are left out.
    pub fn search(&self, query: &FieldedTerms, k: usize) -> Vec<SearchResult> {
        let tokens = query_tokens(query);
        if tokens.is_empty() || k == 0 || self.doc_ids.is_empty() {
            return Vec::new();
        }
        let n = self.num_docs();
        let mut sum = vec![0.0f64; n];
        let mut matched = vec![0u32; n];
        let mut best = vec![0.0f64; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<u32> = Vec::new();

        for (&token, &qtf) in &tokens {
            for field in Field::ALL {
                let postings = self.postings(field, token);
                if postings.is_empty() {
                    continue;
                }
                let df = postings.len();
                let boost = self.boosts[field.index()];
                for p in postings {
                    let d = p.doc as usize;
                    let len = self.field_lengths[d][field.index()];
                    let w = term_weight(p.tf, df, n, len, boost);
                    if !seen[d] {
                        seen[d] = true;
                        touched.push(p.doc);
                    }
                    if w > best[d] {
                        best[d] = w;
                    }
                }
            }
            for &d in &touched {
                let d = d as usize;
                sum[d] += best[d] * f64::from(qtf);
                matched[d] += 1;
                best[d] = 0.0;
                seen[d] = false;
            }
            touched.clear();
        }

        let distinct = tokens.len() as f64;
        let mut hits: Vec<(u32, f64)> = (0..n)
            .filter(|&d| matched[d] > 0)
            .map(|d| (d as u32, sum[d] * (f64::from(matched[d]) / distinct)))
            .filter(|&(_, s)| s > 0.0)
            .collect();
        hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        hits.truncate(k);
        hits.into_iter()
            .enumerate()
            .map(|(i, (d, score))| SearchResult {
                doc_id: self.doc_ids[d as usize].clone(),
                score,
                rank: i + 1,
            })
            .collect()
    }
}

pub fn idf(num_docs: usize, doc_freq: usize) -> f64 {
    1.0 + (num_docs as f64 / (doc_freq as f64 + 1.0)).ln()
}

fn term_weight(tf: u32, df: usize, num_docs: usize, field_length: u32, boost: f64) -> f64 {
    let idf = idf(num_docs, df);
    f64::from(tf).sqrt() * idf * idf * boost * (1.0 / f64::from(field_length).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terms(opaths: &[&str]) -> FieldedTerms {
        FieldedTerms {
            opaths: vec![opaths.iter().map(|s| s.to_string()).collect()],
            ..Default::default()
        }
    }

    #[test]
    fn empty_index() {
        let index = build_index(Vec::new()).unwrap();
        assert_eq!(index.num_docs(), 0);
        assert!(index.search(&terms(&["pi"]), 10).is_empty());
    }

    #[test]
    fn single_doc_df() {
        let index = build_index(vec![("d1".into(), terms(&["pi"]))]).unwrap();
        assert_eq!(index.num_docs(), 1);
        assert_eq!(index.doc_freq(Field::Opaths, "pi"), 1);
    }

    #[test]
    fn df_and_tf_counts() {
        let index = build_index(vec![
            ("a".into(), terms(&["x", "x", "y"])),
            ("b".into(), terms(&["x"])),
            ("c".into(), terms(&["z"])),
        ])
        .unwrap();
        assert_eq!(index.doc_freq(Field::Opaths, "x"), 2);
        assert_eq!(index.term_freq(Field::Opaths, "x", "a"), 2);
        assert_eq!(index.term_freq(Field::Opaths, "x", "b"), 1);
        assert_eq!(index.term_freq(Field::Opaths, "x", "c"), 0);
        assert_eq!(index.field_length("a", Field::Opaths), 3);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = build_index(vec![
            ("a".into(), terms(&["x"])),
            ("a".into(), terms(&["y"])),
        ]);
        assert!(matches!(err, Err(Error::DuplicateDoc(id)) if id == "a"));
    }

    #[test]
    fn score_term_examples() {
        // N=2, df=1, tf=1, len=4
        let index = build_index(vec![
            ("a".into(), terms(&["t", "u", "v", "w"])),
            ("b".into(), terms(&["q"])),
        ])
        .unwrap();
        assert!((index.score_term("t", Field::Opaths, "a") - 0.5).abs() < 1e-15);
        assert_eq!(index.score_term("t", Field::Opaths, "b"), 0.0);
        assert_eq!(index.score_term("nope", Field::Opaths, "a"), 0.0);

        // N=1, df=1, tf=4, len=16
        let mut bag = vec!["t"; 4];
        bag.extend(["o"; 12]);
        let index = build_index(vec![("a".into(), terms(&bag))]).unwrap();
        let expected = 2.0 * (1.0 + 0.5f64.ln()).powi(2) * 0.25;
        assert!((index.score_term("t", Field::Opaths, "a") - expected).abs() < 1e-15);
        assert!((expected - 0.047).abs() < 1e-3);
    }

    #[test]
    fn coord_ranks_fuller_match_first() {
        // each doc's single-term weight is identical; A matches both tokens
        let index = build_index(vec![
            ("A".into(), terms(&["p", "q"])),
            ("B".into(), terms(&["p", "r"])),
            ("C".into(), terms(&["q", "s"])),
        ])
        .unwrap();
        let hits = index.search(&terms(&["p", "q"]), 10);
        assert_eq!(hits[0].doc_id, "A");
        assert_eq!(hits[0].rank, 1);
        assert!(hits[0].score > 2.0 * hits[1].score - 1e-12);
    }

    #[test]
    fn unknown_query_terms_return_nothing() {
        let index = build_index(vec![("a".into(), terms(&["x"]))]).unwrap();
        assert!(index.search(&terms(&["y"]), 10).is_empty());
        assert!(index.search(&FieldedTerms::default(), 10).is_empty());
    }

    #[test]
    fn ties_break_by_doc_id() {
        let index = build_index(vec![
            ("b".into(), terms(&["x"])),
            ("a".into(), terms(&["x"])),
        ])
        .unwrap();
        let hits = index.search(&terms(&["x"]), 10);
        let ids: Vec<&str> = hits.iter().map(|h| h.doc_id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert_eq!(hits[0].score, hits[1].score);
    }
}
