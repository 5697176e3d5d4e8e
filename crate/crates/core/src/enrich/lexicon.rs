use std::collections::HashMap;

use crate::expr::{node_token, ExprNode};

/// Lexical correspondences used to align presentation leaves with content
/// leaves before rules are read off a pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalMap {
    /// `mo` text to content element name.
    pub operators: HashMap<String, String>,
    /// Identifier-like text (function names, named constants) to content
    /// element name.
    pub names: HashMap<String, String>,
}

const OPERATORS: &[(&str, &str)] = &[
    ("+", "plus"),
    ("-", "minus"),
    ("\u{00d7}", "times"),
    ("\u{2062}", "times"),
    ("\u{22c5}", "times"),
    ("\u{00b7}", "times"),
    ("*", "times"),
    ("/", "divide"),
    ("\u{00f7}", "divide"),
    ("=", "eq"),
    ("\u{2260}", "neq"),
    ("<", "lt"),
    (">", "gt"),
    ("\u{2264}", "leq"),
    ("\u{2265}", "geq"),
    ("\u{2208}", "in"),
    ("\u{2192}", "tendsto"),
    ("\u{222b}", "int"),
    ("\u{2211}", "sum"),
    ("\u{220f}", "product"),
    ("!", "factorial"),
    ("lim", "limit"),
];

const FUNCTIONS: &[&str] = &[
    "sin", "cos", "tan", "cot", "sec", "csc", "sinh", "cosh", "tanh", "arcsin", "arccos", "arctan",
    "log", "ln", "exp",
];

const CONSTANTS: &[(&str, &str)] = &[
    ("\u{03c0}", "pi"),
    ("\u{221e}", "infinity"),
    ("\u{2147}", "exponentiale"),
    ("\u{2148}", "imaginaryi"),
];

impl Default for LexicalMap {
    fn default() -> LexicalMap {
        let operators = OPERATORS
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let names = FUNCTIONS
            .iter()
            .map(|f| (f.to_string(), f.to_string()))
            .chain(
                CONSTANTS
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.to_string())),
            )
            .collect();
        LexicalMap { operators, names }
    }
}

impl LexicalMap {
    /// Content leaf tokens a presentation leaf may correspond to, most
    /// specific first.
    pub fn candidates(&self, leaf: &ExprNode) -> Vec<String> {
        let Some(text) = leaf.text.as_deref() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        match leaf.label.as_str() {
            "mi" => {
                out.extend(self.names.get(text).cloned());
                out.push(node_token(&ExprNode::leaf("ci", text)));
            }
            "mn" => out.push(node_token(&ExprNode::leaf("cn", text))),
            "mo" => {
                out.extend(self.operators.get(text).cloned());
                out.extend(self.names.get(text).cloned());
            }
            "mtext" => out.push(node_token(&ExprNode::leaf("csymbol", text))),
            _ => {}
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidates_by_element() {
        let m = LexicalMap::default();
        assert_eq!(m.candidates(&ExprNode::leaf("mi", "x")), ["ci#x"]);
        assert_eq!(
            m.candidates(&ExprNode::leaf("mi", "sin")),
            ["sin", "ci#sin"]
        );
        assert_eq!(
            m.candidates(&ExprNode::leaf("mi", "\u{03c0}")),
            ["pi", "ci#\u{03c0}"]
        );
        assert_eq!(m.candidates(&ExprNode::leaf("mn", "2")), ["cn#2"]);
        assert_eq!(m.candidates(&ExprNode::leaf("mo", "\u{2062}")), ["times"]);
        assert!(m.candidates(&ExprNode::leaf("mo", "(")).is_empty());
    }
}
