//! Presentation-to-content conversion with rules learned from parallel
//! markup.
//!
//! Two kinds of rules are extracted from (presentation, content) pairs:
//!
//! * [`TranslationRule`]: a presentation pattern tree rewritten to a
//!   content template tree. Pattern leaves may be variables `V1..Vn` that
//!   bind whole subtrees; the template reuses them, each replaced by the
//!   conversion of what it bound.
//! * [`SegmentationRule`]: cuts the ordered children of an `mrow` into
//!   literal items and contiguous spans, and assembles a content template
//!   over the spans. A span of several children is converted as an `mrow`
//!   of its own, which is how operator grouping inside flat rows is learned.
//!
//! Variables are encoded in rule trees as `<rule-var>N</rule-var>` leaves.

mod apply;
mod arena;
mod cv;
mod extract;
mod lexicon;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use apply::{apply_rules, Enricher};
pub use cv::{cross_convert, cross_validate, fold_assignment, CvReport, FoldReport};
pub use extract::{extract_rules, extract_rules_with, Extraction};
pub use lexicon::LexicalMap;

use crate::error::{Error, Result};
use crate::expr::{parse_mathml, ExprNode, ExprTree};

pub const VAR_LABEL: &str = "rule-var";

pub fn var(n: u32) -> ExprNode {
    ExprNode::leaf(VAR_LABEL, n.to_string())
}

/// The variable number if `node` is a rule variable.
pub fn as_var(node: &ExprNode) -> Option<u32> {
    if node.label == VAR_LABEL && node.children.is_empty() {
        node.text.as_deref()?.parse().ok()
    } else {
        None
    }
}

fn collect_vars(node: &ExprNode, out: &mut Vec<u32>) {
    if let Some(v) = as_var(node) {
        out.push(v);
    }
    for c in &node.children {
        collect_vars(c, out);
    }
}

/// Nodes that are not variables.
fn fixed_nodes(node: &ExprNode) -> usize {
    node.preorder().filter(|n| as_var(n).is_none()).count()
}

/// Leaves that are not variables.
fn fixed_leaves(node: &ExprNode) -> usize {
    node.preorder()
        .filter(|n| n.children.is_empty() && as_var(n).is_none())
        .count()
}

mod xml_node {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::expr::{parse_mathml, ExprNode};

    pub fn serialize<S: Serializer>(node: &ExprNode, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&node.to_xml())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExprNode, D::Error> {
        let text = String::deserialize(d)?;
        parse_mathml(&text)
            .map(|t| t.root)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRule {
    #[serde(with = "xml_node")]
    pub lhs: ExprNode,
    #[serde(with = "xml_node")]
    pub rhs: ExprNode,
    pub freq: u32,
}

impl TranslationRule {
    pub fn fixed_nodes(&self) -> usize {
        fixed_nodes(&self.lhs)
    }

    fn validate(&self) -> Result<()> {
        let mut lhs_vars = Vec::new();
        collect_vars(&self.lhs, &mut lhs_vars);
        let mut rhs_vars = Vec::new();
        collect_vars(&self.rhs, &mut rhs_vars);
        let lhs_set: BTreeSet<u32> = lhs_vars.iter().copied().collect();
        if lhs_set.len() != lhs_vars.len() {
            return Err(Error::InvalidRule(format!(
                "variable repeated in {}",
                self.lhs.to_xml()
            )));
        }
        if let Some(v) = rhs_vars.iter().find(|v| !lhs_set.contains(v)) {
            return Err(Error::InvalidRule(format!("V{v} missing from the pattern")));
        }
        if as_var(&self.lhs).is_some() {
            return Err(Error::InvalidRule("pattern is a bare variable".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegItem {
    Literal(#[serde(with = "xml_node")] ExprNode),
    Span(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentationRule {
    pub context: String,
    pub pattern: Vec<SegItem>,
    #[serde(with = "xml_node")]
    pub template: ExprNode,
    /// Operator tokens seen at the top level of a multi-child span during
    /// extraction. A span may only swallow operators listed here.
    #[serde(default)]
    pub inner_ops: BTreeSet<String>,
    pub freq: u32,
}

impl SegmentationRule {
    pub fn fixed_nodes(&self) -> usize {
        1 + self
            .pattern
            .iter()
            .map(|item| match item {
                SegItem::Literal(n) => n.node_count(),
                SegItem::Span(_) => 0,
            })
            .sum::<usize>()
    }

    pub fn pattern_key(&self) -> String {
        let mut key = format!("{}[", self.context);
        for item in &self.pattern {
            match item {
                SegItem::Literal(n) => key.push_str(&n.to_xml()),
                SegItem::Span(v) => {
                    key.push_str("<span>");
                    key.push_str(&v.to_string());
                    key.push_str("</span>");
                }
            }
        }
        key.push(']');
        key
    }

    fn validate(&self) -> Result<()> {
        let spans: Vec<u32> = self
            .pattern
            .iter()
            .filter_map(|i| match i {
                SegItem::Span(v) => Some(*v),
                SegItem::Literal(_) => None,
            })
            .collect();
        if spans.is_empty() {
            return Err(Error::InvalidRule("segmentation without spans".into()));
        }
        if self.pattern.len() == 1 {
            return Err(Error::InvalidRule("segmentation with a lone span".into()));
        }
        let set: BTreeSet<u32> = spans.iter().copied().collect();
        if set.len() != spans.len() {
            return Err(Error::InvalidRule("span variable repeated".into()));
        }
        let mut rhs_vars = Vec::new();
        collect_vars(&self.template, &mut rhs_vars);
        if let Some(v) = rhs_vars.iter().find(|v| !set.contains(v)) {
            return Err(Error::InvalidRule(format!("V{v} missing from the split")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub translation: Vec<TranslationRule>,
    pub segmentation: Vec<SegmentationRule>,
}

impl RuleSet {
    pub fn new() -> RuleSet {
        RuleSet::default()
    }

    pub fn len(&self) -> usize {
        self.translation.len() + self.segmentation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Adds rules, merging duplicates by summing their frequencies.
    pub fn merge(&mut self, other: RuleSet) {
        let mut builder = RuleSetBuilder::default();
        for r in self.translation.drain(..).chain(other.translation) {
            builder.add_translation(r);
        }
        for r in self.segmentation.drain(..).chain(other.segmentation) {
            builder.add_segmentation(r);
        }
        *self = builder.finish();
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.translation {
            r.validate()?;
        }
        for r in &self.segmentation {
            r.validate()?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rule sets always serialize")
    }

    pub fn from_json(text: &str) -> Result<RuleSet> {
        let rules: RuleSet = serde_json::from_str(text)?;
        rules.validate()?;
        Ok(rules)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RuleSet> {
        RuleSet::from_json(&fs::read_to_string(path)?)
    }
}

/// Accumulates rules keyed by their serialized form.
#[derive(Default)]
pub(crate) struct RuleSetBuilder {
    translation: BTreeMap<(String, String), TranslationRule>,
    segmentation: BTreeMap<(String, String), SegmentationRule>,
}

impl RuleSetBuilder {
    pub(crate) fn add_translation(&mut self, rule: TranslationRule) {
        let key = (rule.lhs.to_xml(), rule.rhs.to_xml());
        self.translation
            .entry(key)
            .and_modify(|r| r.freq += rule.freq)
            .or_insert(rule);
    }

    pub(crate) fn add_segmentation(&mut self, rule: SegmentationRule) {
        let key = (rule.pattern_key(), rule.template.to_xml());
        match self.segmentation.get_mut(&key) {
            Some(r) => {
                r.freq += rule.freq;
                r.inner_ops.extend(rule.inner_ops);
            }
            None => {
                self.segmentation.insert(key, rule);
            }
        }
    }

    pub(crate) fn finish(self) -> RuleSet {
        RuleSet {
            translation: self.translation.into_values().collect(),
            segmentation: self.segmentation.into_values().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnrichmentResult {
    pub ctree: ExprTree,
    /// Share of presentation leaves consumed by some rule.
    pub coverage: f64,
    /// Presentation leaves that no rule consumed, in document order. Each
    /// appears in `ctree` as a `csymbol` carrying its token.
    pub residuals: Vec<ExprNode>,
}

/// Collapses `mrow` elements that have a single child.
pub fn normalize_presentation(node: &ExprNode) -> ExprNode {
    if node.label == "mrow" && node.children.len() == 1 {
        return normalize_presentation(&node.children[0]);
    }
    let mut out = node.clone();
    out.children = node.children.iter().map(normalize_presentation).collect();
    out
}

/// Parses a rule-tree string, for tests and hand-written rule files.
pub fn rule_tree(xml: &str) -> Result<ExprNode> {
    Ok(parse_mathml(xml)?.root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_validation() {
        let rules = RuleSet {
            translation: vec![TranslationRule {
                lhs: rule_tree("<msup><rule-var>1</rule-var><mn>2</mn></msup>").unwrap(),
                rhs: rule_tree("<apply><power/><rule-var>1</rule-var><cn>2</cn></apply>").unwrap(),
                freq: 3,
            }],
            segmentation: vec![SegmentationRule {
                context: "mrow".into(),
                pattern: vec![
                    SegItem::Span(1),
                    SegItem::Literal(ExprNode::leaf("mo", "+")),
                    SegItem::Span(2),
                ],
                template: rule_tree(
                    "<apply><plus/><rule-var>1</rule-var><rule-var>2</rule-var></apply>",
                )
                .unwrap(),
                inner_ops: ["mo#×".to_string()].into(),
                freq: 1,
            }],
        };
        let back = RuleSet::from_json(&rules.to_json()).unwrap();
        assert_eq!(back, rules);

        let bad = r#"{"translation":[{"lhs":"<msup><rule-var>1</rule-var><mn>2</mn></msup>","rhs":"<rule-var>2</rule-var>","freq":1}],"segmentation":[]}"#;
        assert!(matches!(
            RuleSet::from_json(bad),
            Err(Error::InvalidRule(_))
        ));
    }

    #[test]
    fn merge_sums_frequencies() {
        let r = TranslationRule {
            lhs: ExprNode::leaf("mi", "x"),
            rhs: ExprNode::leaf("ci", "x"),
            freq: 1,
        };
        let mut a = RuleSet {
            translation: vec![r.clone()],
            segmentation: vec![],
        };
        a.merge(RuleSet {
            translation: vec![r],
            segmentation: vec![],
        });
        assert_eq!(a.translation.len(), 1);
        assert_eq!(a.translation[0].freq, 2);
    }

    #[test]
    fn single_child_mrows_collapse() {
        let n =
            rule_tree("<mrow><mrow><msup><mrow><mi>x</mi></mrow><mn>2</mn></msup></mrow></mrow>")
                .unwrap();
        assert_eq!(
            normalize_presentation(&n),
            rule_tree("<msup><mi>x</mi><mn>2</mn></msup>").unwrap()
        );
    }
}
