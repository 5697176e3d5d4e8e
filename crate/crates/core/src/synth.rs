//! Random presentation expressions for load and retrieval tests.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Document, ExprNode, ExprTree};

const IDENTIFIERS: &[&str] = &[
    "a", "b", "c", "d", "f", "g", "k", "n", "m", "p", "q", "r", "s", "t", "u", "v", "w", "x", "y",
    "z", "\u{03b1}", "\u{03b2}", "\u{03b3}", "\u{03bb}", "\u{03bc}", "\u{03bd}", "\u{03c0}",
    "\u{03c6}", "\u{03c8}", "\u{03c9}",
];
const OPERATORS: &[&str] = &["+", "-", "=", "\u{2062}", "\u{00d7}", "/", "<", "\u{2264}"];
const FUNCTIONS: &[&str] = &["sin", "cos", "tan", "log", "exp", "ln"];

fn leaf<R: Rng + ?Sized>(rng: &mut R) -> ExprNode {
    if rng.random_bool(0.7) {
        ExprNode::leaf("mi", *IDENTIFIERS.choose(rng).unwrap())
    } else {
        ExprNode::leaf("mn", rng.random_range(0..100u32).to_string())
    }
}

fn mo(text: &str) -> ExprNode {
    ExprNode::leaf("mo", text)
}

/// Splits `budget` leaves over `parts` children, each getting at least one.
fn split<R: Rng + ?Sized>(rng: &mut R, budget: usize, parts: usize) -> Vec<usize> {
    let mut out = vec![1; parts];
    for _ in parts..budget {
        if rng.random_bool(0.5) {
            out[rng.random_range(0..parts)] += 1;
        }
    }
    out
}

/// A random presentation tree with at most `max_leaves` leaves.
pub fn random_expression<R: Rng + ?Sized>(rng: &mut R, max_leaves: usize) -> ExprNode {
    let max_leaves = max_leaves.max(1);
    let budget = rng.random_range(1..=max_leaves);
    node(rng, budget, 0)
}

fn node<R: Rng + ?Sized>(rng: &mut R, budget: usize, depth: usize) -> ExprNode {
    if budget == 1 || (depth > 0 && rng.random_bool(0.15)) {
        return leaf(rng);
    }
    let choice = if budget >= 5 {
        rng.random_range(0..7)
    } else if budget >= 3 {
        rng.random_range(0..6)
    } else {
        rng.random_range(0..4)
    };
    match choice {
        0..=2 => {
            let label = ["msup", "msub", "mfrac"][choice];
            let b = split(rng, budget, 2);
            ExprNode::new(
                label,
                vec![node(rng, b[0], depth + 1), node(rng, b[1], depth + 1)],
            )
        }
        3 => ExprNode::new("msqrt", vec![node(rng, budget, depth + 1)]),
        4 => {
            // infix row: operands interleaved with operators
            let max_operands = budget.div_ceil(2).min(4);
            let operands = rng.random_range(2..=max_operands.max(2));
            let b = split(rng, budget - (operands - 1), operands);
            let mut children = Vec::new();
            for (i, &n) in b.iter().enumerate() {
                if i > 0 {
                    children.push(mo(OPERATORS.choose(rng).unwrap()));
                }
                children.push(node(rng, n, depth + 1));
            }
            ExprNode::new("mrow", children)
        }
        5 => {
            let b = split(rng, budget, 3);
            ExprNode::new(
                "msubsup",
                b.iter().map(|&n| node(rng, n, depth + 1)).collect(),
            )
        }
        _ => {
            // f(arg): name, apply-function, parenthesized argument
            let arg = node(rng, budget - 4, depth + 1);
            ExprNode::new(
                "mrow",
                vec![
                    ExprNode::leaf("mi", *FUNCTIONS.choose(rng).unwrap()),
                    mo("\u{2061}"),
                    ExprNode::new("mrow", vec![mo("("), arg, mo(")")]),
                ],
            )
        }
    }
}

/// `n` structurally distinct documents with ids `s000000`, `s000001`, ...
/// Deterministic for a given seed.
pub fn synthetic_corpus(n: usize, seed: u64, max_leaves: usize) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n);
    let mut docs = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while docs.len() < n && attempts < n.saturating_mul(100).max(1000) {
        attempts += 1;
        let tree = ExprTree::in_math(random_expression(&mut rng, max_leaves));
        if seen.insert(tree.to_xml()) {
            docs.push(Document {
                doc_id: format!("s{:06}", docs.len()),
                source_uri: None,
                ptree: tree,
                ctree_gold: None,
                ctree_se: None,
            });
        }
    }
    docs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn respects_leaf_bound_and_is_distinct() {
        let docs = synthetic_corpus(500, 1, 12);
        assert_eq!(docs.len(), 500);
        assert!(docs.iter().all(|d| d.ptree.leaf_count() <= 12));
        let distinct: HashSet<String> = docs.iter().map(|d| d.ptree.to_xml()).collect();
        assert_eq!(distinct.len(), 500);
        assert_eq!(synthetic_corpus(50, 1, 12), synthetic_corpus(50, 1, 12));
    }
}
