//! Rule application as a memoized search over views of the presentation
//! tree. A view is a node or a contiguous run of an `mrow`'s children.
//!
//! For each view the candidate consuming the most presentation leaves
//! wins. Ties go to the rule with more fixed nodes, then higher frequency,
//! then the smaller serialized pattern, segmentation before translation,
//! and finally the leftmost split. A view with no applicable rule keeps its
//! shape inside a `csymbol`-headed `apply`; an unmatched leaf becomes a
//! `csymbol` carrying its token and is reported as a residual.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::rc::Rc;

use super::arena::Arena;
use super::{
    as_var, fixed_leaves, fixed_nodes, normalize_presentation, EnrichmentResult, RuleSet, SegItem,
    SegmentationRule,
};
use crate::expr::{node_token, ExprNode, ExprTree, Markup};

/// Upper bound on splits tried per segmentation rule and view.
const MAX_SPLITS: usize = 256;

pub fn apply_rules(ptree: &ExprTree, rules: &RuleSet) -> EnrichmentResult {
    Enricher::new(rules).apply(ptree)
}

struct Compiled {
    key: String,
    fixed_nodes: usize,
    fixed_leaves: usize,
}

/// A rule set indexed for repeated application.
pub struct Enricher<'r> {
    rules: &'r RuleSet,
    translation: Vec<Compiled>,
    segmentation: Vec<Compiled>,
    by_shape: HashMap<String, Vec<usize>>,
}

fn shape_of(label: &str, text: Option<&str>, arity: usize) -> String {
    if arity == 0 {
        format!("L:{label}#{}", text.unwrap_or(""))
    } else {
        format!("N:{label}/{arity}")
    }
}

impl<'r> Enricher<'r> {
    pub fn new(rules: &'r RuleSet) -> Enricher<'r> {
        let mut by_shape: HashMap<String, Vec<usize>> = HashMap::new();
        let translation = rules
            .translation
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let shape = shape_of(&r.lhs.label, r.lhs.text.as_deref(), r.lhs.children.len());
                by_shape.entry(shape).or_default().push(i);
                Compiled {
                    key: r.lhs.to_xml(),
                    fixed_nodes: fixed_nodes(&r.lhs),
                    fixed_leaves: fixed_leaves(&r.lhs),
                }
            })
            .collect();
        let segmentation = rules
            .segmentation
            .iter()
            .map(|r| Compiled {
                key: r.pattern_key(),
                fixed_nodes: r.fixed_nodes(),
                fixed_leaves: r
                    .pattern
                    .iter()
                    .map(|i| match i {
                        SegItem::Literal(n) => n.leaf_count(),
                        SegItem::Span(_) => 0,
                    })
                    .sum(),
            })
            .collect();
        Enricher {
            rules,
            translation,
            segmentation,
            by_shape,
        }
    }

    pub fn apply(&self, ptree: &ExprTree) -> EnrichmentResult {
        let root = normalize_presentation(&ptree.root);
        let arena = Arena::new(&root);
        let mut run = Run {
            en: self,
            arena: &arena,
            memo: HashMap::new(),
        };
        let conv = run.convert(View::Node(0));
        let leaves = root.leaf_count();
        EnrichmentResult {
            ctree: ExprTree {
                wrappers: ptree.wrappers.clone(),
                root: conv.tree.clone(),
                markup: Markup::Content,
            },
            coverage: conv.consumed as f64 / leaves as f64,
            residuals: conv.residuals.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum View {
    Node(usize),
    /// Children `s..e` of an `mrow`, read as an `mrow` of their own.
    Span(usize, usize, usize),
}

struct Conv {
    tree: ExprNode,
    consumed: usize,
    residuals: Vec<ExprNode>,
}

struct Run<'e, 'a> {
    en: &'e Enricher<'e>,
    arena: &'a Arena<'a>,
    memo: HashMap<View, Rc<Conv>>,
}

/// A matched rule before its tree is built.
struct Candidate<'t> {
    template: &'t ExprNode,
    bindings: Vec<(u32, View)>,
    literal_leaves: usize,
}

type Rank<'k> = (
    Reverse<usize>,
    Reverse<usize>,
    Reverse<u32>,
    &'k str,
    u8,
    usize,
);

impl<'e, 'a> Run<'e, 'a> {
    fn kids(&self, view: View) -> &'a [usize] {
        let arena: &'a Arena<'a> = self.arena;
        match view {
            View::Node(id) => &arena.children[id],
            View::Span(id, s, e) => &arena.children[id][s..e],
        }
    }

    fn label(&self, view: View) -> &'a str {
        match view {
            View::Node(id) => &self.arena.nodes[id].label,
            View::Span(..) => "mrow",
        }
    }

    fn text(&self, view: View) -> Option<&'a str> {
        match view {
            View::Node(id) => self.arena.nodes[id].text.as_deref(),
            View::Span(..) => None,
        }
    }

    fn first_leaf(&self, view: View) -> usize {
        match view {
            View::Node(id) => id,
            View::Span(id, s, _) => self.arena.children[id][s],
        }
    }

    fn convert(&mut self, view: View) -> Rc<Conv> {
        if let Some(c) = self.memo.get(&view) {
            return Rc::clone(c);
        }
        let conv = Rc::new(self.best(view));
        self.memo.insert(view, Rc::clone(&conv));
        conv
    }

    fn best(&mut self, view: View) -> Conv {
        let en = self.en;
        let mut best: Option<(Rank<'e>, Candidate<'e>)> = None;
        let mut seq = 0usize;
        let mut offer = |rank: Rank<'e>, cand: Candidate<'e>| {
            if best.as_ref().is_none_or(|(r, _)| rank < *r) {
                best = Some((rank, cand));
            }
        };

        let kids = self.kids(view);
        if self.label(view) == "mrow" && kids.len() >= 2 {
            for (i, rule) in en.rules.segmentation.iter().enumerate() {
                if rule.pattern.len() > kids.len() {
                    continue;
                }
                let meta = &en.segmentation[i];
                for split in self.splits(rule, kids) {
                    let bindings: Vec<(u32, View)> = split
                        .into_iter()
                        .map(|(v, s, e)| (v, self.span_view(view, s, e)))
                        .collect();
                    let consumed = meta.fixed_leaves + self.bound_consumed(&bindings);
                    seq += 1;
                    let rank = (
                        Reverse(consumed),
                        Reverse(meta.fixed_nodes),
                        Reverse(rule.freq),
                        meta.key.as_str(),
                        0,
                        seq,
                    );
                    offer(
                        rank,
                        Candidate {
                            template: &rule.template,
                            bindings,
                            literal_leaves: meta.fixed_leaves,
                        },
                    );
                }
            }
        }

        let shape = shape_of(self.label(view), self.text(view), kids.len());
        if let Some(ids) = en.by_shape.get(&shape) {
            for &i in ids {
                let rule = &en.rules.translation[i];
                let mut bindings = Vec::new();
                if !self.matches(&rule.lhs, view, &mut bindings) {
                    continue;
                }
                let meta = &en.translation[i];
                let consumed = meta.fixed_leaves + self.bound_consumed(&bindings);
                seq += 1;
                let rank = (
                    Reverse(consumed),
                    Reverse(meta.fixed_nodes),
                    Reverse(rule.freq),
                    meta.key.as_str(),
                    1,
                    seq,
                );
                offer(
                    rank,
                    Candidate {
                        template: &rule.rhs,
                        bindings,
                        literal_leaves: meta.fixed_leaves,
                    },
                );
            }
        }

        let fallback = self.fallback(view);
        match best {
            Some(((Reverse(consumed), ..), cand)) if consumed >= fallback.consumed => {
                self.build(cand)
            }
            _ => fallback,
        }
    }

    fn bound_consumed(&mut self, bindings: &[(u32, View)]) -> usize {
        bindings
            .iter()
            .map(|&(_, v)| self.convert(v).consumed)
            .sum()
    }

    fn span_view(&self, parent: View, s: usize, e: usize) -> View {
        let kids = self.kids(parent);
        if e - s == 1 {
            return View::Node(kids[s]);
        }
        match parent {
            View::Node(id) => View::Span(id, s, e),
            View::Span(id, s0, _) => View::Span(id, s0 + s, s0 + e),
        }
    }

    fn matches(&self, pat: &ExprNode, view: View, bindings: &mut Vec<(u32, View)>) -> bool {
        if let Some(v) = as_var(pat) {
            bindings.push((v, view));
            return true;
        }
        let kids = self.kids(view);
        pat.label == self.label(view)
            && pat.text.as_deref() == self.text(view)
            && pat.children.len() == kids.len()
            && pat
                .children
                .iter()
                .zip(kids)
                .all(|(pc, &k)| self.matches(pc, View::Node(k), bindings))
    }

    /// Ways to lay `rule`'s pattern over `kids`, as (variable, start, end)
    /// spans relative to `kids`.
    fn splits(&self, rule: &SegmentationRule, kids: &[usize]) -> Vec<Vec<(u32, usize, usize)>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.split_from(rule, kids, 0, 0, &mut cur, &mut out);
        out
    }

    fn split_from(
        &self,
        rule: &SegmentationRule,
        kids: &[usize],
        item: usize,
        pos: usize,
        cur: &mut Vec<(u32, usize, usize)>,
        out: &mut Vec<Vec<(u32, usize, usize)>>,
    ) {
        if out.len() >= MAX_SPLITS {
            return;
        }
        let Some(it) = rule.pattern.get(item) else {
            if pos == kids.len() {
                out.push(cur.clone());
            }
            return;
        };
        let rest = rule.pattern.len() - item - 1;
        match it {
            SegItem::Literal(n) => {
                if pos < kids.len() && self.arena.nodes[kids[pos]] == n {
                    self.split_from(rule, kids, item + 1, pos + 1, cur, out);
                }
            }
            SegItem::Span(v) => {
                if kids.len() < pos + 1 + rest {
                    return;
                }
                for end in pos + 1..=kids.len() - rest {
                    if end - pos > 1 {
                        let n = self.arena.nodes[kids[end - 1]];
                        let first = self.arena.nodes[kids[pos]];
                        if !self.op_allowed(rule, n)
                            || (end - pos == 2 && !self.op_allowed(rule, first))
                        {
                            break;
                        }
                    }
                    cur.push((*v, pos, end));
                    self.split_from(rule, kids, item + 1, end, cur, out);
                    cur.pop();
                }
            }
        }
    }

    fn op_allowed(&self, rule: &SegmentationRule, node: &ExprNode) -> bool {
        node.label != "mo" || !node.is_leaf() || rule.inner_ops.contains(&node_token(node))
    }

    fn build(&mut self, cand: Candidate<'_>) -> Conv {
        let mut bindings = cand.bindings;
        bindings.sort_by_key(|&(_, v)| self.first_leaf(v));
        let mut bound: HashMap<u32, Rc<Conv>> = HashMap::new();
        let mut consumed = cand.literal_leaves;
        let mut residuals = Vec::new();
        for &(v, view) in &bindings {
            let c = self.convert(view);
            consumed += c.consumed;
            residuals.extend(c.residuals.iter().cloned());
            bound.insert(v, c);
        }
        Conv {
            tree: instantiate(cand.template, &bound),
            consumed,
            residuals,
        }
    }

    fn fallback(&mut self, view: View) -> Conv {
        let kids = self.kids(view);
        if kids.is_empty() {
            let View::Node(id) = view else {
                unreachable!("spans are never empty")
            };
            let leaf = self.arena.nodes[id];
            return Conv {
                tree: ExprNode::leaf("csymbol", node_token(leaf)),
                consumed: 0,
                residuals: vec![leaf.clone()],
            };
        }
        let mut children = vec![ExprNode::leaf("csymbol", self.label(view))];
        let mut consumed = 0;
        let mut residuals = Vec::new();
        for &k in kids {
            let c = self.convert(View::Node(k));
            children.push(c.tree.clone());
            consumed += c.consumed;
            residuals.extend(c.residuals.iter().cloned());
        }
        Conv {
            tree: ExprNode::new("apply", children),
            consumed,
            residuals,
        }
    }
}

fn instantiate(template: &ExprNode, bound: &HashMap<u32, Rc<Conv>>) -> ExprNode {
    if let Some(v) = as_var(template) {
        if let Some(c) = bound.get(&v) {
            return c.tree.clone();
        }
    }
    if template.children.is_empty() {
        return template.clone();
    }
    ExprNode {
        label: template.label.clone(),
        text: None,
        children: template
            .children
            .iter()
            .map(|c| instantiate(c, bound))
            .collect(),
        kind: template.kind,
    }
}
