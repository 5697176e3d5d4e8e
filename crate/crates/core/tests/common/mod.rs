#![allow(dead_code)]

use mathseek_core::{ExprNode, ExprTree};
use proptest::prelude::*;

const LEAF_LABELS: &[&str] = &["mi", "mn", "mo", "ci", "cn", "csymbol", "pi", "plus", "foo"];
const INNER_LABELS: &[&str] = &["mrow", "msup", "mfrac", "apply", "msqrt", "bvar", "mstyle"];

/// Leaf text without leading or trailing whitespace, including characters
/// that need escaping in XML or in tokens.
pub fn leaf_text() -> impl Strategy<Value = Option<String>> {
    prop_oneof![
        1 => Just(None),
        4 => "[a-z0-9#\\\\&<>π∞+=-]{1,3}( [a-z#]{1,2})?".prop_map(Some),
    ]
}

pub fn leaf() -> impl Strategy<Value = ExprNode> {
    (prop::sample::select(LEAF_LABELS), leaf_text()).prop_map(|(label, text)| match text {
        Some(t) => ExprNode::leaf(label, t),
        None => ExprNode::empty(label),
    })
}

pub fn expr() -> impl Strategy<Value = ExprNode> {
    leaf().prop_recursive(4, 40, 4, |inner| {
        (
            prop::sample::select(INNER_LABELS),
            prop::collection::vec(inner, 1..4),
        )
            .prop_map(|(label, children)| ExprNode::new(label, children))
    })
}

pub fn wrappers() -> impl Strategy<Value = Vec<String>> {
    prop_oneof![
        Just(vec![]),
        Just(vec!["math".to_string()]),
        Just(vec!["math".to_string(), "semantics".to_string()]),
    ]
}

pub fn tree() -> impl Strategy<Value = ExprTree> {
    (wrappers(), expr()).prop_map(|(w, root)| ExprTree::new(w, root))
}
