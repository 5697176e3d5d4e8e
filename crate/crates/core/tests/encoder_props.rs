mod common;

use std::collections::BTreeMap;

use mathseek_core::{encode_document, encode_query, ExprNode, Field, FieldedTerms};
use proptest::prelude::*;

fn bag(terms: &FieldedTerms, field: Field) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for t in terms.tokens(field) {
        *out.entry(t.to_string()).or_insert(0) += 1;
    }
    out
}

fn depth_sum(node: &ExprNode, depth: usize) -> usize {
    depth
        + 1
        + node
            .children
            .iter()
            .map(|c| depth_sum(c, depth + 1))
            .sum::<usize>()
}

fn is_ordered_token(token: &str) -> bool {
    // (<pos>#)* followed by a node token that starts with a letter
    let mut rest = token;
    loop {
        let digits = rest.chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            return rest.starts_with(|c: char| c.is_ascii_alphabetic());
        }
        if rest[..digits].starts_with('0') || !rest[digits..].starts_with('#') {
            return false;
        }
        rest = &rest[digits + 1..];
    }
}

proptest! {
    #[test]
    fn query_bag_is_contained_in_document_bag(t in common::tree()) {
        let doc = encode_document(&t);
        let query = encode_query(&t);
        for field in Field::ALL {
            let d = bag(&doc, field);
            for (token, n) in bag(&query, field) {
                prop_assert!(d.get(&token).copied().unwrap_or(0) >= n, "{token} in {field}");
            }
        }
    }

    #[test]
    fn token_counts_follow_tree_shape(t in common::tree()) {
        let w = t.wrappers.len();
        let n = t.root.node_count();
        let doc = encode_document(&t);
        let expected = w * n + depth_sum(&t.root, 0);
        prop_assert_eq!(doc.token_count(Field::Opaths), expected);
        prop_assert_eq!(doc.token_count(Field::Upaths), expected);
        prop_assert_eq!(doc.token_count(Field::Sisters), n);

        let query = encode_query(&t);
        prop_assert_eq!(query.token_count(Field::Opaths), n);
        prop_assert_eq!(query.token_count(Field::Upaths), n * w.max(1));
        prop_assert_eq!(query.token_count(Field::Sisters), n);
    }

    #[test]
    fn token_grammar(t in common::tree()) {
        let doc = encode_document(&t);
        for token in doc.tokens(Field::Opaths) {
            prop_assert!(!token.is_empty() && !token.contains(char::is_whitespace));
            prop_assert!(is_ordered_token(token), "{token}");
        }
        for token in doc.tokens(Field::Upaths) {
            let body = token.trim_start_matches('#');
            prop_assert!(body.starts_with(|c: char| c.is_ascii_alphabetic()), "{token}");
        }
        // the same nodes appear in every field, by label
        let strip = |s: &str| s.trim_start_matches(|c: char| c == '#' || c.is_ascii_digit()).to_string();
        let sisters: std::collections::BTreeSet<String> = doc.tokens(Field::Sisters).map(strip).collect();
        let opaths: std::collections::BTreeSet<String> = doc.tokens(Field::Opaths).map(strip).collect();
        let upaths: std::collections::BTreeSet<String> = doc.tokens(Field::Upaths).map(strip).collect();
        prop_assert_eq!(&sisters, &opaths);
        prop_assert_eq!(&sisters, &upaths);
    }
}
