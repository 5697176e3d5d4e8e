//! MathML expression trees.
//!
//! An [`ExprTree`] separates the wrapper chain (`math`, `semantics`) from the
//! expression proper. Attributes are not kept, annotation subtrees are
//! discarded, and leaf text is trimmed, so two sources that differ only in
//! those respects parse to equal trees.

mod parse;
pub mod vocab;

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

pub use parse::{parse_mathml, parse_mathml_verbose, ParseWarning};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Presentation,
    Content,
    Wrapper,
}

impl NodeKind {
    /// Classifies an element name. Labels outside both vocabularies count
    /// as content, which is also where enrichment places `csymbol` residuals.
    pub fn of(label: &str) -> NodeKind {
        if vocab::is_wrapper(label) {
            NodeKind::Wrapper
        } else if vocab::is_presentation(label) {
            NodeKind::Presentation
        } else {
            NodeKind::Content
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Markup {
    Presentation,
    Content,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExprNode {
    pub label: String,
    /// Literal content; only ever set on leaves.
    pub text: Option<String>,
    pub children: Vec<ExprNode>,
    pub kind: NodeKind,
}

impl ExprNode {
    pub fn leaf(label: impl Into<String>, text: impl Into<String>) -> ExprNode {
        let label = label.into();
        let text = text.into();
        ExprNode {
            kind: NodeKind::of(&label),
            label,
            text: if text.is_empty() { None } else { Some(text) },
            children: Vec::new(),
        }
    }

    /// A leaf without text, such as `<pi/>` or `<plus/>`.
    pub fn empty(label: impl Into<String>) -> ExprNode {
        ExprNode::new(label, Vec::new())
    }

    pub fn new(label: impl Into<String>, children: Vec<ExprNode>) -> ExprNode {
        let label = label.into();
        ExprNode {
            kind: NodeKind::of(&label),
            label,
            text: None,
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn leaf_count(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(ExprNode::leaf_count).sum()
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(ExprNode::node_count)
            .sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(ExprNode::depth).max().unwrap_or(0)
    }

    /// Pre-order iterator over this node and its descendants.
    pub fn preorder(&self) -> Preorder<'_> {
        Preorder { stack: vec![self] }
    }

    pub fn token(&self) -> String {
        node_token(self)
    }

    pub fn to_xml(&self) -> String {
        let mut out = String::new();
        write_node(&mut out, self);
        out
    }
}

pub struct Preorder<'a> {
    stack: Vec<&'a ExprNode>,
}

impl<'a> Iterator for Preorder<'a> {
    type Item = &'a ExprNode;

    fn next(&mut self) -> Option<&'a ExprNode> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExprTree {
    /// Wrapper element names from the outermost inward.
    pub wrappers: Vec<String>,
    pub root: ExprNode,
    pub markup: Markup,
}

impl ExprTree {
    pub fn new(wrappers: Vec<String>, root: ExprNode) -> ExprTree {
        let markup = infer_markup(&root);
        ExprTree {
            wrappers,
            root,
            markup,
        }
    }

    /// Wraps `root` in a single `math` element.
    pub fn in_math(root: ExprNode) -> ExprTree {
        ExprTree::new(vec!["math".to_string()], root)
    }

    pub fn leaf_count(&self) -> usize {
        leaf_count(self)
    }

    pub fn to_xml(&self) -> String {
        serialize(self)
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

pub(crate) fn infer_markup(root: &ExprNode) -> Markup {
    if vocab::is_presentation(&root.label) {
        return Markup::Presentation;
    }
    if vocab::is_content(&root.label) {
        return Markup::Content;
    }
    let presentational = root
        .preorder()
        .filter(|n| vocab::is_presentation(&n.label))
        .count();
    let content = root
        .preorder()
        .filter(|n| vocab::is_content(&n.label))
        .count();
    if presentational > content {
        Markup::Presentation
    } else {
        Markup::Content
    }
}

/// Number of leaves in the expression, wrappers excluded.
pub fn leaf_count(tree: &ExprTree) -> usize {
    tree.root.leaf_count()
}

/// The index alphabet symbol for a node: `label` or `label#text`.
///
/// Inside the text, `\` becomes `\\`, `#` becomes `\#` and any whitespace
/// character becomes `\_`, so the first unescaped `#` is always the separator.
pub fn node_token(node: &ExprNode) -> String {
    let mut token = node.label.clone();
    if let Some(text) = &node.text {
        token.push('#');
        for c in text.chars() {
            match c {
                '\\' => token.push_str("\\\\"),
                '#' => token.push_str("\\#"),
                c if c.is_whitespace() => token.push_str("\\_"),
                c => token.push(c),
            }
        }
    }
    token
}

pub fn serialize(tree: &ExprTree) -> String {
    let mut out = String::new();
    for w in &tree.wrappers {
        let _ = write!(out, "<{w}>");
    }
    write_node(&mut out, &tree.root);
    for w in tree.wrappers.iter().rev() {
        let _ = write!(out, "</{w}>");
    }
    out
}

fn write_node(out: &mut String, node: &ExprNode) {
    if node.children.is_empty() {
        match &node.text {
            Some(text) => {
                let _ = write!(out, "<{0}>{1}</{0}>", node.label, escape_text(text));
            }
            None => {
                let _ = write!(out, "<{}/>", node.label);
            }
        }
        return;
    }
    let _ = write!(out, "<{}>", node.label);
    for child in &node.children {
        write_node(out, child);
    }
    let _ = write!(out, "</{}>", node.label);
}

fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c => out.push(c),
        }
    }
    out
}

/// A corpus entry with its presentation tree and optional content forms.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub source_uri: Option<String>,
    pub ptree: ExprTree,
    pub ctree_gold: Option<ExprTree>,
    pub ctree_se: Option<ExprTree>,
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SIN_PI_8: &str = r#"<math><semantics><apply><sin /><apply><times /><pi /><apply><power /><cn type="integer">8</cn><cn type="integer">-1</cn></apply></apply></apply></semantics></math>"#;

    #[test]
    fn minimal_wrapper_chain() {
        let t = parse_mathml("<math><semantics><pi/></semantics></math>").unwrap();
        assert_eq!(t.wrappers, vec!["math", "semantics"]);
        assert_eq!(t.root, ExprNode::empty("pi"));
        assert_eq!(t.markup, Markup::Content);
    }

    #[test]
    fn sin_pi_over_eight_structure() {
        let t = parse_mathml(SIN_PI_8).unwrap();
        let expected = ExprNode::new(
            "apply",
            vec![
                ExprNode::empty("sin"),
                ExprNode::new(
                    "apply",
                    vec![
                        ExprNode::empty("times"),
                        ExprNode::empty("pi"),
                        ExprNode::new(
                            "apply",
                            vec![
                                ExprNode::empty("power"),
                                ExprNode::leaf("cn", "8"),
                                ExprNode::leaf("cn", "-1"),
                            ],
                        ),
                    ],
                ),
            ],
        );
        assert_eq!(t.root, expected);
        assert_eq!(leaf_count(&t), 6);
    }

    #[test]
    fn attributes_dropped() {
        let t = parse_mathml(r#"<cn type="integer">8</cn>"#).unwrap();
        assert!(t.wrappers.is_empty());
        assert_eq!(t.root, ExprNode::leaf("cn", "8"));
        assert_eq!(node_token(&t.root), "cn#8");
    }

    #[test]
    fn serialize_examples() {
        assert_eq!(ExprNode::leaf("cn", "8").to_xml(), "<cn>8</cn>");
        let t = ExprTree::in_math(ExprNode::leaf("mi", "x"));
        assert_eq!(serialize(&t), "<math><mi>x</mi></math>");
        let again = parse_mathml(&serialize(&parse_mathml(SIN_PI_8).unwrap())).unwrap();
        assert_eq!(again, parse_mathml(SIN_PI_8).unwrap());
    }

    #[test]
    fn leaf_counts() {
        assert_eq!(ExprNode::empty("pi").leaf_count(), 1);
        let sum = ExprNode::new(
            "apply",
            vec![
                ExprNode::empty("plus"),
                ExprNode::leaf("ci", "x"),
                ExprNode::leaf("ci", "y"),
            ],
        );
        assert_eq!(sum.leaf_count(), 3);
    }

    #[test]
    fn tokens() {
        assert_eq!(node_token(&ExprNode::leaf("cn", "8")), "cn#8");
        assert_eq!(node_token(&ExprNode::empty("sin")), "sin");
        assert_eq!(node_token(&ExprNode::leaf("mi", "a#b")), "mi#a\\#b");
        assert_eq!(node_token(&ExprNode::leaf("mtext", "if x")), "mtext#if\\_x");
    }

    #[test]
    fn escaped_text_round_trips() {
        let t = ExprTree::in_math(ExprNode::leaf("mo", "<&>"));
        assert_eq!(parse_mathml(&serialize(&t)).unwrap(), t);
    }
}
