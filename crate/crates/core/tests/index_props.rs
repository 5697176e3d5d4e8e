use std::collections::{BTreeMap, HashMap};

use mathseek_core::index::{load_index, save_index};
use mathseek_core::synth::synthetic_corpus;
use mathseek_core::{build_index, encode_document, encode_query, ExprTree, Field, FieldedTerms};
use proptest::prelude::*;

/// Scores every document directly from its encoded fields.
fn brute_force(docs: &[(String, FieldedTerms)], query: &FieldedTerms) -> Vec<(String, f64)> {
    let n = docs.len() as f64;
    let counts: Vec<[HashMap<String, usize>; 3]> = docs
        .iter()
        .map(|(_, terms)| {
            Field::ALL.map(|f| {
                let mut m = HashMap::new();
                for t in terms.tokens(f) {
                    *m.entry(t.to_string()).or_insert(0) += 1;
                }
                m
            })
        })
        .collect();
    let mut qtf: BTreeMap<String, usize> = BTreeMap::new();
    for f in Field::ALL {
        for t in query.tokens(f) {
            *qtf.entry(t.to_string()).or_insert(0) += 1;
        }
    }
    let mut out = Vec::new();
    for (d, (id, terms)) in docs.iter().enumerate() {
        let mut sum = 0.0;
        let mut matched = 0;
        for (token, &q) in &qtf {
            let mut best = 0.0f64;
            let mut hit = false;
            for f in Field::ALL {
                let Some(&tf) = counts[d][f.index()].get(token) else {
                    continue;
                };
                hit = true;
                let df = counts
                    .iter()
                    .filter(|c| c[f.index()].contains_key(token))
                    .count();
                let idf = 1.0 + (n / (df as f64 + 1.0)).ln();
                let len = terms.token_count(f) as f64;
                best = best.max((tf as f64).sqrt() * idf * idf / len.sqrt());
            }
            if hit {
                matched += 1;
                sum += best * q as f64;
            }
        }
        let score = sum * matched as f64 / qtf.len() as f64;
        if score > 0.0 {
            out.push((id.clone(), score));
        }
    }
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

fn corpus(n: usize, seed: u64) -> Vec<(String, ExprTree)> {
    synthetic_corpus(n, seed, 8)
        .into_iter()
        .map(|d| (d.doc_id, d.ptree))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn search_matches_brute_force(n in 1usize..50, seed in any::<u64>(), pick in any::<prop::sample::Index>(), sub in any::<prop::sample::Index>()) {
        let docs = corpus(n, seed);
        let encoded: Vec<(String, FieldedTerms)> =
            docs.iter().map(|(id, t)| (id.clone(), encode_document(t))).collect();
        let index = build_index(encoded.clone()).unwrap();

        // a subtree of some document, so the query shares tokens with the corpus
        let root = &docs[pick.index(docs.len())].1.root;
        let nodes: Vec<_> = root.preorder().collect();
        let query = encode_query(&ExprTree::in_math(nodes[sub.index(nodes.len())].clone()));

        let expected = brute_force(&encoded, &query);
        let got = index.search(&query, usize::MAX);
        prop_assert_eq!(got.len(), expected.len());
        for (i, (r, (id, score))) in got.iter().zip(&expected).enumerate() {
            prop_assert_eq!(&r.doc_id, id);
            prop_assert_eq!(r.rank, i + 1);
            prop_assert!((r.score - score).abs() <= 1e-12 * score.max(1.0), "{} vs {}", r.score, score);
        }
    }
}

#[test]
fn k_beyond_corpus_returns_every_match() {
    let docs = corpus(30, 7);
    let index = build_index(
        docs.iter()
            .map(|(id, t)| (id.clone(), encode_document(t)))
            .collect(),
    )
    .unwrap();
    let query = encode_query(&docs[0].1);
    let all = index.search(&query, 1000);
    assert!(!all.is_empty() && all.len() <= 30);
    assert_eq!(index.search(&query, all.len()), all);
    assert_eq!(index.search(&query, 3), all[..3.min(all.len())].to_vec());
    assert!(index.search(&query, 0).is_empty());
    assert_eq!(all[0].doc_id, docs[0].0);
}

#[test]
fn persistence_round_trip() {
    let docs = corpus(1000, 11);
    let index = build_index(
        docs.iter()
            .map(|(id, t)| (id.clone(), encode_document(t)))
            .collect(),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("idx");
    save_index(&index, &path).unwrap();
    let loaded = load_index(&path).unwrap();
    assert_eq!(loaded, index);
    for (_, tree) in docs.iter().step_by(97) {
        let q = encode_query(tree);
        assert_eq!(loaded.search(&q, 10), index.search(&q, 10));
    }
}

#[test]
fn corrupt_index_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("idx");
    let index = build_index(
        corpus(20, 3)
            .iter()
            .map(|(id, t)| (id.clone(), encode_document(t)))
            .collect(),
    )
    .unwrap();
    save_index(&index, &path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    let mid = bytes.len() / 2;
    bytes.truncate(mid);
    std::fs::write(&path, &bytes).unwrap();
    assert!(load_index(&path).is_err());
}

#[test]
fn duplicate_ids_are_rejected() {
    let t = encode_document(&corpus(1, 1)[0].1);
    assert!(build_index(vec![("a".into(), t.clone()), ("a".into(), t)]).is_err());
}
