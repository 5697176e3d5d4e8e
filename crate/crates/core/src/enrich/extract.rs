//! Rule extraction from aligned (presentation, content) pairs.
//!
//! Leaves are aligned through the [`LexicalMap`] in document order. Each
//! content node is then paired with the lowest presentation node covering
//! all of its aligned leaves, provided no alignment link leaves the pair.
//! Every pair yields translation rules; pairs of an `mrow` with an `apply`
//! additionally yield a segmentation rule.

use std::collections::{BTreeSet, HashMap};

use super::arena::Arena;
use super::{
    normalize_presentation, var, LexicalMap, RuleSet, RuleSetBuilder, SegItem, SegmentationRule,
    TranslationRule,
};
use crate::expr::{node_token, ExprNode, ExprTree};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extraction {
    pub rules: RuleSet,
    /// Indices of input pairs that produced no rules, with the reason.
    pub skipped: Vec<(usize, String)>,
}

/// Frontier sizes up to this bound get every variable subset.
const FULL_SUBSETS: usize = 3;

pub fn extract_rules(pairs: &[(ExprTree, ExprTree)]) -> RuleSet {
    extract_rules_with(pairs, &LexicalMap::default()).rules
}

pub fn extract_rules_with(pairs: &[(ExprTree, ExprTree)], lexicon: &LexicalMap) -> Extraction {
    let mut builder = RuleSetBuilder::default();
    let mut skipped = Vec::new();
    for (i, (ptree, ctree)) in pairs.iter().enumerate() {
        let p = normalize_presentation(&ptree.root);
        if !extract_pair(&p, &ctree.root, lexicon, &mut builder) {
            skipped.push((i, "no leaves could be aligned".to_string()));
        }
    }
    for (i, why) in &skipped {
        log::debug!("pair {i} skipped: {why}");
    }
    Extraction {
        rules: builder.finish(),
        skipped,
    }
}

struct Alignment<'a> {
    pa: Arena<'a>,
    ca: Arena<'a>,
    p_link: Vec<Option<usize>>,
    c_link: Vec<Option<usize>>,
    /// Content node paired with each presentation node.
    p_pair: Vec<Option<usize>>,
    pairs: Vec<(usize, usize)>,
    /// Content nodes in operator position of an `apply` or `bind`.
    head: Vec<bool>,
}

fn extract_pair(p: &ExprNode, c: &ExprNode, lexicon: &LexicalMap, b: &mut RuleSetBuilder) -> bool {
    let Some(al) = align(p, c, lexicon) else {
        return false;
    };
    for &(pp, cc) in &al.pairs {
        translation_rules(&al, pp, cc, b);
        segmentation_rule(&al, pp, cc, lexicon, b);
    }
    true
}

fn align<'a>(p: &'a ExprNode, c: &'a ExprNode, lexicon: &LexicalMap) -> Option<Alignment<'a>> {
    let pa = Arena::new(p);
    let ca = Arena::new(c);
    let mut p_link = vec![None; pa.len()];
    let mut c_link = vec![None; ca.len()];

    let c_leaves = ca.leaves();
    let c_tokens: Vec<String> = c_leaves.iter().map(|&i| node_token(ca.nodes[i])).collect();
    let mut any = false;
    for pl in pa.leaves() {
        for cand in lexicon.candidates(pa.nodes[pl]) {
            let hit = c_leaves
                .iter()
                .zip(&c_tokens)
                .find(|(&cl, tok)| c_link[cl].is_none() && **tok == cand);
            if let Some((&cl, _)) = hit {
                p_link[pl] = Some(cl);
                c_link[cl] = Some(pl);
                any = true;
                break;
            }
        }
    }
    if !any {
        return None;
    }

    let mut head = vec![false; ca.len()];
    for id in 0..ca.len() {
        let label = ca.nodes[id].label.as_str();
        if label == "apply" || label == "bind" {
            if let Some(&first) = ca.children[id].first() {
                head[first] = true;
            }
        }
    }

    let mut al = Alignment {
        p_pair: vec![None; pa.len()],
        pairs: Vec::new(),
        pa,
        ca,
        p_link,
        c_link,
        head,
    };

    // descendants come before ancestors in reverse pre-order
    for cc in (0..al.ca.len()).rev() {
        if unaligned_head(&al, cc) {
            // only the argument leaves are visible, so the covering node
            // would be too low
            continue;
        }
        let mut lca: Option<usize> = None;
        for cl in al.ca.subtree(cc) {
            if let Some(pl) = al.c_link[cl] {
                lca = Some(match lca {
                    None => pl,
                    Some(a) => al.pa.lca(a, pl),
                });
            }
        }
        let Some(mut pp) = lca else { continue };
        let mut free = true;
        while al.p_pair[pp].is_some() {
            match al.pa.parent[pp] {
                Some(up) => pp = up,
                None => {
                    free = false;
                    break;
                }
            }
        }
        if free && consistent(&al, pp, cc) {
            al.p_pair[pp] = Some(cc);
            al.pairs.push((pp, cc));
        }
    }
    if al.p_pair[0].is_none() {
        al.p_pair[0] = Some(0);
        al.pairs.push((0, 0));
    }
    al.pairs.sort();
    Some(al)
}

fn unaligned_head(al: &Alignment<'_>, cc: usize) -> bool {
    match al.ca.children[cc].first() {
        Some(&h) if al.head[h] => al.ca.subtree(h).all(|cl| al.c_link[cl].is_none()),
        _ => false,
    }
}

fn consistent(al: &Alignment<'_>, pp: usize, cc: usize) -> bool {
    al.pa
        .subtree(pp)
        .all(|pl| al.p_link[pl].is_none_or(|cl| al.ca.contains(cc, cl)))
}

/// Clone of the subtree at `id` with the nodes in `repl` swapped for
/// variables.
fn substitute(arena: &Arena<'_>, id: usize, repl: &HashMap<usize, u32>) -> ExprNode {
    if let Some(&v) = repl.get(&id) {
        return var(v);
    }
    let node = arena.nodes[id];
    if arena.is_leaf(id) {
        return node.clone();
    }
    let children = arena.children[id]
        .iter()
        .map(|&c| substitute(arena, c, repl))
        .collect();
    ExprNode {
        label: node.label.clone(),
        text: None,
        children,
        kind: node.kind,
    }
}

fn translation_rules(al: &Alignment<'_>, pp: usize, cc: usize, b: &mut RuleSetBuilder) {
    let inner: Vec<(usize, usize)> = al
        .pairs
        .iter()
        .copied()
        .filter(|&(p2, c2)| {
            p2 != pp && al.pa.contains(pp, p2) && c2 != cc && al.ca.contains(cc, c2) && !al.head[c2]
        })
        .collect();
    let mut frontier: Vec<(usize, usize)> = Vec::new();
    for &(p2, c2) in &inner {
        let dominated = inner.iter().any(|&(p3, c3)| {
            (p3, c3) != (p2, c2) && al.pa.contains(p3, p2) && al.ca.contains(c3, c2)
        });
        let overlaps = frontier.iter().any(|&(p3, c3)| {
            al.pa.contains(p3, p2)
                || al.pa.contains(p2, p3)
                || al.ca.contains(c3, c2)
                || al.ca.contains(c2, c3)
        });
        if !dominated && !overlaps {
            frontier.push((p2, c2));
        }
    }

    for subset in subsets(frontier.len()) {
        let mut p_repl = HashMap::new();
        let mut c_repl = HashMap::new();
        for (k, &i) in subset.iter().enumerate() {
            let (p2, c2) = frontier[i];
            p_repl.insert(p2, k as u32 + 1);
            c_repl.insert(c2, k as u32 + 1);
        }
        b.add_translation(TranslationRule {
            lhs: substitute(&al.pa, pp, &p_repl),
            rhs: substitute(&al.ca, cc, &c_repl),
            freq: 1,
        });
    }
}

/// Index subsets of `0..n`, each ascending.
fn subsets(n: usize) -> Vec<Vec<usize>> {
    if n <= FULL_SUBSETS {
        return (0..1u32 << n)
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect();
    }
    let mut out = vec![Vec::new(), (0..n).collect()];
    for i in 0..n {
        out.push(vec![i]);
        out.push((0..n).filter(|&j| j != i).collect());
    }
    out
}

fn segmentation_rule(
    al: &Alignment<'_>,
    pp: usize,
    cc: usize,
    lexicon: &LexicalMap,
    b: &mut RuleSetBuilder,
) {
    let kids = &al.pa.children[pp];
    let c_kids = &al.ca.children[cc];
    if al.pa.nodes[pp].label != "mrow" || kids.len() < 2 || c_kids.is_empty() {
        return;
    }
    let column = |pl: usize| kids.partition_point(|&k| k <= pl) - 1;
    let has_head = matches!(al.ca.nodes[cc].label.as_str(), "apply" | "bind");

    let mut head_cols = BTreeSet::new();
    let mut spans: Vec<(usize, usize, usize)> = Vec::new();
    for (i, &a) in c_kids.iter().enumerate() {
        let cols: BTreeSet<usize> = al
            .ca
            .subtree(a)
            .filter_map(|cl| al.c_link[cl])
            .map(column)
            .collect();
        if has_head && i == 0 {
            head_cols = cols;
            continue;
        }
        if let (Some(&s), Some(&e)) = (cols.first(), cols.last()) {
            spans.push((a, s, e));
        }
    }
    if spans.is_empty() {
        return;
    }
    spans.sort_by_key(|&(_, s, _)| s);
    if spans.windows(2).any(|w| w[0].2 >= w[1].1) {
        return;
    }
    if spans.len() == 1 && spans[0].1 == 0 && spans[0].2 == kids.len() - 1 {
        return;
    }
    for &(a, s, e) in &spans {
        if head_cols.range(s..=e).next().is_some() {
            return;
        }
        let first = kids[s];
        let last = kids[e];
        let range = first..last + al.pa.size[last];
        if range
            .clone()
            .any(|pl| al.p_link[pl].is_some_and(|cl| !al.ca.contains(a, cl)))
        {
            return;
        }
        if s == e && al.p_pair[first] != Some(a) {
            return;
        }
    }

    let mut pattern = Vec::new();
    let mut repl = HashMap::new();
    let mut inner_ops = BTreeSet::new();
    let mut i = 0;
    let mut k = 0u32;
    for &(a, s, e) in &spans {
        while i < s {
            pattern.push(SegItem::Literal(al.pa.nodes[kids[i]].clone()));
            i += 1;
        }
        k += 1;
        pattern.push(SegItem::Span(k));
        repl.insert(a, k);
        if e > s {
            for &kid in &kids[s..=e] {
                let n = al.pa.nodes[kid];
                if n.label == "mo" && n.is_leaf() {
                    inner_ops.insert(node_token(n));
                }
            }
        }
        i = e + 1;
    }
    while i < kids.len() {
        pattern.push(SegItem::Literal(al.pa.nodes[kids[i]].clone()));
        i += 1;
    }
    b.add_segmentation(SegmentationRule {
        context: "mrow".to_string(),
        pattern,
        template: substitute(&al.ca, cc, &repl),
        inner_ops,
        freq: 1,
    });

    for &(a, s, e) in &spans {
        if e > s {
            let sub = ExprNode::new(
                "mrow",
                kids[s..=e]
                    .iter()
                    .map(|&k| al.pa.nodes[k].clone())
                    .collect(),
            );
            extract_pair(&sub, al.ca.nodes[a], lexicon, b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enrich::rule_tree;
    use crate::expr::parse_mathml;

    fn pair(p: &str, c: &str) -> (ExprTree, ExprTree) {
        (parse_mathml(p).unwrap(), parse_mathml(c).unwrap())
    }

    fn x_squared() -> (ExprTree, ExprTree) {
        pair(
            "<math><msup><mi>x</mi><mn>2</mn></msup></math>",
            "<math><apply><power/><ci>x</ci><cn>2</cn></apply></math>",
        )
    }

    fn has_rule(rules: &RuleSet, lhs: &str, rhs: &str) -> bool {
        let lhs = rule_tree(lhs).unwrap();
        let rhs = rule_tree(rhs).unwrap();
        rules
            .translation
            .iter()
            .any(|r| r.lhs == lhs && r.rhs == rhs)
    }

    #[test]
    fn power_rules() {
        let rules = extract_rules(&[x_squared()]);
        assert!(has_rule(
            &rules,
            "<msup><rule-var>1</rule-var><mn>2</mn></msup>",
            "<apply><power/><rule-var>1</rule-var><cn>2</cn></apply>"
        ));
        assert!(has_rule(
            &rules,
            "<msup><rule-var>1</rule-var><rule-var>2</rule-var></msup>",
            "<apply><power/><rule-var>1</rule-var><rule-var>2</rule-var></apply>"
        ));
        assert!(has_rule(&rules, "<mi>x</mi>", "<ci>x</ci>"));
        assert!(rules.validate().is_ok());
    }

    #[test]
    fn empty_input_and_duplicates() {
        assert!(extract_rules(&[]).is_empty());
        let once = extract_rules(&[x_squared()]);
        let twice = extract_rules(&[x_squared(), x_squared()]);
        assert_eq!(once.len(), twice.len());
        for (a, b) in once.translation.iter().zip(&twice.translation) {
            assert_eq!(b.freq, 2 * a.freq);
        }
    }

    #[test]
    fn unalignable_pair_is_skipped() {
        let ex = extract_rules_with(
            &[pair("<math><mi>x</mi></math>", "<math><ci>y</ci></math>")],
            &LexicalMap::default(),
        );
        assert!(ex.rules.is_empty());
        assert_eq!(ex.skipped.len(), 1);
    }

    #[test]
    fn infix_row_segments() {
        let rules = extract_rules(&[pair(
            "<math><mrow><mi>a</mi><mo>+</mo><mi>b</mi><mo>&InvisibleTimes;</mo><mi>c</mi></mrow></math>",
            "<math><apply><plus/><ci>a</ci><apply><times/><ci>b</ci><ci>c</ci></apply></apply></math>",
        )]);
        let top = rules
            .segmentation
            .iter()
            .find(|r| r.pattern.len() == 3 && r.template.children[0].label == "plus")
            .expect("a + (span) split");
        assert_eq!(top.pattern[1], SegItem::Literal(ExprNode::leaf("mo", "+")));
        assert!(top.inner_ops.contains("mo#\u{2062}"));
        assert!(rules
            .segmentation
            .iter()
            .any(|r| r.template.children[0].label == "times"));
    }
}
