//! Keyword encoding of expression trees into the `opaths`, `upaths` and
//! `sisters` fields.
//!
//! Every node is written relative to each of its ancestors-or-self (its
//! anchors). An ordered path token spells out the 1-based child positions
//! from the anchor down to the node, `2#3#1#power`; the unordered twin keeps
//! only one `#` per edge, `###power`. Wrapper elements act as anchors but
//! never appear as token labels.
//!
//! Rows keep the grouping in which tokens were produced (one row per anchor
//! or sibling set). Search treats the fields as flat token bags.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::{node_token, ExprNode, ExprTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Opaths,
    Upaths,
    Sisters,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Opaths, Field::Upaths, Field::Sisters];

    pub fn name(self) -> &'static str {
        match self {
            Field::Opaths => "opaths",
            Field::Upaths => "upaths",
            Field::Sisters => "sisters",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type Row = Vec<String>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FieldedTerms {
    pub opaths: Vec<Row>,
    pub upaths: Vec<Row>,
    pub sisters: Vec<Row>,
}

impl FieldedTerms {
    pub fn rows(&self, field: Field) -> &[Row] {
        match field {
            Field::Opaths => &self.opaths,
            Field::Upaths => &self.upaths,
            Field::Sisters => &self.sisters,
        }
    }

    pub fn tokens(&self, field: Field) -> impl Iterator<Item = &str> + '_ {
        self.rows(field).iter().flatten().map(String::as_str)
    }

    pub fn token_count(&self, field: Field) -> usize {
        self.rows(field).iter().map(Vec::len).sum()
    }

    /// Term frequencies for one field.
    pub fn counts(&self, field: Field) -> BTreeMap<&str, u32> {
        let mut counts = BTreeMap::new();
        for t in self.tokens(field) {
            *counts.entry(t).or_insert(0) += 1;
        }
        counts
    }

    pub fn is_empty(&self) -> bool {
        Field::ALL.iter().all(|&f| self.token_count(f) == 0)
    }

    /// One line per field (opaths, upaths, sisters), tokens separated by a
    /// single space.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for field in Field::ALL {
            let line: Vec<&str> = self.tokens(field).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Index-time encoding: every ancestor-or-self of every node is an anchor.
pub fn encode_document(tree: &ExprTree) -> FieldedTerms {
    let wrappers = tree.wrappers.len();
    let mut terms = FieldedTerms::default();

    for w in 0..wrappers {
        let prefix = vec![1u32; wrappers - w];
        terms.opaths.push(ordered_row(&tree.root, &prefix));
        terms.upaths.push(unordered_row(&tree.root, prefix.len()));
    }
    for anchor in tree.root.preorder() {
        terms.opaths.push(ordered_row(anchor, &[]));
        terms.upaths.push(unordered_row(anchor, 0));
    }
    terms.sisters = sister_rows(&tree.root);
    terms
}

/// Query-time encoding: ordered paths from the outermost wrapper only and
/// unordered paths from each wrapper. A tree without wrappers anchors both
/// fields at its root.
pub fn encode_query(tree: &ExprTree) -> FieldedTerms {
    let wrappers = tree.wrappers.len();
    let mut terms = FieldedTerms::default();
    if wrappers == 0 {
        terms.opaths.push(ordered_row(&tree.root, &[]));
        terms.upaths.push(unordered_row(&tree.root, 0));
    } else {
        terms
            .opaths
            .push(ordered_row(&tree.root, &vec![1u32; wrappers]));
        for w in 0..wrappers {
            terms.upaths.push(unordered_row(&tree.root, wrappers - w));
        }
    }
    terms.sisters = sister_rows(&tree.root);
    terms
}

/// Tokens for `node` and its descendants in pre-order, each preceded by the
/// position path from the anchor. `prefix` holds positions between the
/// anchor and `node`.
fn ordered_row(node: &ExprNode, prefix: &[u32]) -> Row {
    fn walk(node: &ExprNode, path: &mut Vec<u32>, row: &mut Row) {
        let mut token = String::new();
        for p in path.iter() {
            token.push_str(&p.to_string());
            token.push('#');
        }
        token.push_str(&node_token(node));
        row.push(token);
        for (i, child) in node.children.iter().enumerate() {
            path.push(i as u32 + 1);
            walk(child, path, row);
            path.pop();
        }
    }
    let mut row = Vec::new();
    let mut path = prefix.to_vec();
    walk(node, &mut path, &mut row);
    row
}

fn unordered_row(node: &ExprNode, depth: usize) -> Row {
    fn walk(node: &ExprNode, depth: usize, row: &mut Row) {
        let mut token = "#".repeat(depth);
        token.push_str(&node_token(node));
        row.push(token);
        for child in &node.children {
            walk(child, depth + 1, row);
        }
    }
    let mut row = Vec::new();
    walk(node, depth, &mut row);
    row
}

/// Sibling groups in post-order of their parent, then the root on its own.
fn sister_rows(root: &ExprNode) -> Vec<Row> {
    fn walk(node: &ExprNode, rows: &mut Vec<Row>) {
        if node.children.is_empty() {
            return;
        }
        for child in &node.children {
            walk(child, rows);
        }
        rows.push(node.children.iter().map(node_token).collect());
    }
    let mut rows = Vec::new();
    walk(root, &mut rows);
    rows.push(vec![node_token(root)]);
    rows
}
