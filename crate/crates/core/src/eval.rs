//! Graded relevance judgments, P@k and nDCG, and the per-mode comparison
//! harness.
//!
//! DCG discounts position `i >= 2` by `log2(i)` and leaves position 1
//! undiscounted, so the first two positions carry equal weight.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::engine::{Mode, Query};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub enum Grade {
    NonRelevant,
    Partial,
    Relevant,
}

impl Grade {
    pub fn value(self) -> f64 {
        match self {
            Grade::NonRelevant => 0.0,
            Grade::Partial => 0.5,
            Grade::Relevant => 1.0,
        }
    }
}

impl TryFrom<f64> for Grade {
    type Error = Error;

    fn try_from(v: f64) -> Result<Grade> {
        if v == 0.0 {
            Ok(Grade::NonRelevant)
        } else if v == 0.5 {
            Ok(Grade::Partial)
        } else if v == 1.0 {
            Ok(Grade::Relevant)
        } else {
            Err(Error::InvalidGrade(v.to_string()))
        }
    }
}

impl From<Grade> for f64 {
    fn from(g: Grade) -> f64 {
        g.value()
    }
}

impl std::str::FromStr for Grade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Grade> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidGrade(s.to_string()))?;
        Grade::try_from(v)
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grade::NonRelevant => f.write_str("0"),
            Grade::Partial => f.write_str("0.5"),
            Grade::Relevant => f.write_str("1"),
        }
    }
}

/// Judgments keyed by query then document. Unjudged pairs grade 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Qrels {
    judged: HashMap<String, HashMap<String, Grade>>,
}

impl Qrels {
    pub fn new() -> Qrels {
        Qrels::default()
    }

    pub fn insert(&mut self, query_id: &str, doc_id: &str, grade: Grade) {
        self.judged
            .entry(query_id.to_string())
            .or_default()
            .insert(doc_id.to_string(), grade);
    }

    pub fn get(&self, query_id: &str, doc_id: &str) -> Option<Grade> {
        self.judged.get(query_id)?.get(doc_id).copied()
    }

    pub fn grade(&self, query_id: &str, doc_id: &str) -> f64 {
        self.get(query_id, doc_id).map_or(0.0, Grade::value)
    }

    /// All judged grades for a query, in no particular order.
    pub fn judged_grades(&self, query_id: &str) -> Vec<f64> {
        self.judged
            .get(query_id)
            .map(|m| m.values().map(|g| g.value()).collect())
            .unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.judged.values().all(HashMap::is_empty)
    }

    pub fn len(&self) -> usize {
        self.judged.values().map(HashMap::len).sum()
    }

    /// Reads `query_id<TAB>doc_id<TAB>grade` lines. Blank lines and lines
    /// starting with `#` are skipped; later lines override earlier ones.
    pub fn from_tsv(reader: impl BufRead) -> Result<Qrels> {
        let mut qrels = Qrels::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::Format {
                    line: i + 1,
                    message: format!("expected 3 tab-separated columns, found {}", cols.len()),
                });
            }
            let grade: Grade = cols[2].parse().map_err(|e: Error| Error::Format {
                line: i + 1,
                message: e.to_string(),
            })?;
            qrels.insert(cols[0], cols[1], grade);
        }
        Ok(qrels)
    }

    /// Sorted by query then document id.
    pub fn to_tsv(&self) -> String {
        let sorted: BTreeMap<&str, BTreeMap<&str, Grade>> = self
            .judged
            .iter()
            .map(|(q, m)| {
                (
                    q.as_str(),
                    m.iter().map(|(d, g)| (d.as_str(), *g)).collect(),
                )
            })
            .collect();
        let mut out = String::new();
        for (q, docs) in sorted {
            for (d, g) in docs {
                let _ = writeln!(out, "{q}\t{d}\t{g}");
            }
        }
        out
    }
}

pub fn dcg(grades: &[f64]) -> f64 {
    grades
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            if i == 0 {
                g
            } else {
                g / ((i + 1) as f64).log2()
            }
        })
        .sum()
}

fn observed<S: AsRef<str>>(ranked: &[S], qrels: &Qrels, query_id: &str, cutoff: usize) -> Vec<f64> {
    ranked
        .iter()
        .take(cutoff)
        .map(|d| qrels.grade(query_id, d.as_ref()))
        .collect()
}

/// nDCG at cutoff `p`. The ideal ordering is the query's judged grades
/// sorted descending; a query with no positive judgment scores 0.
pub fn ndcg<S: AsRef<str>>(ranked: &[S], qrels: &Qrels, query_id: &str, p: usize) -> f64 {
    let mut ideal = qrels.judged_grades(query_id);
    ideal.sort_by(|a, b| b.total_cmp(a));
    ideal.truncate(p);
    let idcg = dcg(&ideal);
    if idcg == 0.0 {
        return 0.0;
    }
    dcg(&observed(ranked, qrels, query_id, p)) / idcg
}

/// Graded precision: the sum of the top `k` grades over `k`, so a partial
/// judgment earns half credit and missing ranks earn none.
pub fn precision_at_k<S: AsRef<str>>(ranked: &[S], qrels: &Qrels, query_id: &str, k: usize) -> f64 {
    observed(ranked, qrels, query_id, k).iter().sum::<f64>() / k as f64
}

/// Binary precision: any grade above 0 counts as a hit.
pub fn precision_at_k_binary<S: AsRef<str>>(
    ranked: &[S],
    qrels: &Qrels,
    query_id: &str,
    k: usize,
) -> f64 {
    let hits = observed(ranked, qrels, query_id, k)
        .iter()
        .filter(|&&g| g > 0.0)
        .count();
    hits as f64 / k as f64
}

/// Anything that can turn a query into a ranked list of document ids for a
/// given mode.
pub trait Retriever {
    fn retrieve(&self, mode: Mode, query: &Query, k: usize) -> Result<Vec<String>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionKind {
    #[default]
    Graded,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryMetrics {
    pub query_id: String,
    pub mode: Mode,
    pub p_at_10: f64,
    pub ndcg: f64,
    pub retrieved: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSummary {
    pub mode: Mode,
    pub ndcg: f64,
    pub p_at_10: f64,
    pub queries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub k: usize,
    pub rows: Vec<QueryMetrics>,
    pub summary: Vec<ModeSummary>,
}

/// Runs every query in every mode, scoring the top `k` with nDCG@k and
/// precision at `k`.
pub fn run_comparison(
    retriever: &dyn Retriever,
    queries: &[Query],
    qrels: &Qrels,
    modes: &[Mode],
    k: usize,
) -> Result<MetricsReport> {
    run_comparison_with(retriever, queries, qrels, modes, k, PrecisionKind::Graded)
}

pub fn run_comparison_with(
    retriever: &dyn Retriever,
    queries: &[Query],
    qrels: &Qrels,
    modes: &[Mode],
    k: usize,
    precision: PrecisionKind,
) -> Result<MetricsReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &mode in modes {
        let mut sum_ndcg = 0.0;
        let mut sum_p = 0.0;
        for query in queries {
            let retrieved = retriever.retrieve(mode, query, k)?;
            let p = match precision {
                PrecisionKind::Graded => precision_at_k(&retrieved, qrels, &query.id, k),
                PrecisionKind::Binary => precision_at_k_binary(&retrieved, qrels, &query.id, k),
            };
            let n = ndcg(&retrieved, qrels, &query.id, k);
            sum_ndcg += n;
            sum_p += p;
            rows.push(QueryMetrics {
                query_id: query.id.clone(),
                mode,
                p_at_10: p,
                ndcg: n,
                retrieved,
            });
        }
        let count = queries.len();
        let mean = |s: f64| if count == 0 { 0.0 } else { s / count as f64 };
        summary.push(ModeSummary {
            mode,
            ndcg: mean(sum_ndcg),
            p_at_10: mean(sum_p),
            queries: count,
        });
    }
    Ok(MetricsReport { k, rows, summary })
}

impl MetricsReport {
    pub fn mode(&self, mode: Mode) -> Option<&ModeSummary> {
        self.summary.iter().find(|s| s.mode == mode)
    }

    pub fn row(&self, mode: Mode, query_id: &str) -> Option<&QueryMetrics> {
        self.rows
            .iter()
            .find(|r| r.mode == mode && r.query_id == query_id)
    }

    /// One row per mode: `method<TAB>nDCG<TAB>P@k`.
    pub fn summary_tsv(&self) -> String {
        let mut out = format!("method\tnDCG\tP@{}\n", self.k);
        for s in &self.summary {
            let _ = writeln!(out, "{}\t{:.3}\t{:.3}", s.mode.label(), s.ndcg, s.p_at_10);
        }
        out
    }

    pub fn detail_tsv(&self) -> String {
        let mut out = format!("query_id\tmethod\tnDCG\tP@{}\tretrieved\n", self.k);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{:.6}\t{:.6}\t{}",
                r.query_id,
                r.mode.label(),
                r.ndcg,
                r.p_at_10,
                r.retrieved.join(",")
            );
        }
        out
    }

    pub fn table(&self) -> String {
        let p_head = format!("P@{}", self.k);
        let mut out = String::new();
        let _ = writeln!(out, "+----------+--------+--------+");
        let _ = writeln!(out, "| {:<8} | {:>6} | {:>6} |", "Method", "nDCG", p_head);
        let _ = writeln!(out, "+----------+--------+--------+");
        for s in &self.summary {
            let _ = writeln!(
                out,
                "| {:<8} | {:>6.3} | {:>6.3} |",
                s.mode.label(),
                s.ndcg,
                s.p_at_10
            );
        }
        let _ = writeln!(out, "+----------+--------+--------+");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qrels_for(grades: &[f64]) -> (Qrels, Vec<String>) {
        let mut q = Qrels::new();
        let mut ranked = Vec::new();
        for (i, &g) in grades.iter().enumerate() {
            let d = format!("d{i}");
            q.insert("q", &d, Grade::try_from(g).unwrap());
            ranked.push(d);
        }
        (q, ranked)
    }

    #[test]
    fn dcg_examples() {
        assert!((dcg(&[1.0, 1.0, 0.5]) - 2.315_464_876_785_729).abs() < 1e-12);
        assert_eq!(dcg(&[0.0]), 0.0);
        assert!((dcg(&[0.5, 1.0, 1.0]) - 2.130_929_753_571_457).abs() < 1e-12);
        assert_eq!(dcg(&[]), 0.0);
    }

    #[test]
    fn ndcg_examples() {
        let (q, ranked) = qrels_for(&[0.5, 1.0, 1.0]);
        let expected = 2.130_929_753_571_457 / 2.315_464_876_785_729;
        assert!((ndcg(&ranked, &q, "q", 10) - expected).abs() < 1e-12);
        assert!((expected - 0.920_304).abs() < 1e-6);

        let (q, ranked) = qrels_for(&[1.0, 0.5, 0.5, 0.0]);
        assert_eq!(ndcg(&ranked, &q, "q", 10), 1.0);

        let (q, ranked) = qrels_for(&[0.0, 0.0]);
        assert_eq!(ndcg(&ranked, &q, "q", 10), 0.0);
    }

    #[test]
    fn precision_examples() {
        let mut grades = vec![1.0, 1.0, 0.5];
        grades.extend([0.0; 7]);
        let (q, ranked) = qrels_for(&grades);
        assert!((precision_at_k(&ranked, &q, "q", 10) - 0.25).abs() < 1e-15);
        assert!((precision_at_k_binary(&ranked, &q, "q", 10) - 0.3).abs() < 1e-15);

        let (q, ranked) = qrels_for(&[1.0; 10]);
        assert_eq!(precision_at_k(&ranked, &q, "q", 10), 1.0);
    }

    #[test]
    fn short_rankings_count_missing_as_zero() {
        let (q, ranked) = qrels_for(&[1.0]);
        assert!((precision_at_k(&ranked, &q, "q", 10) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn qrels_tsv() {
        let src = "# comment\nq1\td1\t1\nq1\td2\t0.5\n\nq2\td1\t0\n";
        let q = Qrels::from_tsv(src.as_bytes()).unwrap();
        assert_eq!(q.len(), 3);
        assert_eq!(q.grade("q1", "d2"), 0.5);
        assert_eq!(q.grade("q9", "d1"), 0.0);
        assert_eq!(q.to_tsv(), "q1\td1\t1\nq1\td2\t0.5\nq2\td1\t0\n");
        assert!(Qrels::from_tsv("q\td\t0.7\n".as_bytes()).is_err());
        assert!(Qrels::from_tsv("q\td\n".as_bytes()).is_err());
    }

    #[test]
    fn grade_serde() {
        assert_eq!(serde_json::to_string(&Grade::Partial).unwrap(), "0.5");
        let g: Grade = serde_json::from_str("1").unwrap();
        assert_eq!(g, Grade::Relevant);
        assert!(serde_json::from_str::<Grade>("0.25").is_err());
    }
}
