mod common;

use mathseek_core::{leaf_count, node_token, parse_mathml, serialize, ExprNode};
use proptest::prelude::*;

proptest! {
    #[test]
    fn serialize_round_trips(t in common::tree()) {
        let back = parse_mathml(&serialize(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn leaf_count_counts_childless_nodes(t in common::tree()) {
        let direct = t.root.preorder().filter(|n| n.children.is_empty()).count();
        prop_assert!(leaf_count(&t) >= 1);
        prop_assert_eq!(leaf_count(&t), direct);
    }

    #[test]
    fn tokens_have_no_whitespace_and_one_separator(n in common::leaf()) {
        let token = node_token(&n);
        prop_assert!(!token.chars().any(char::is_whitespace));
        // unescaped '#' only between label and text
        let mut unescaped = 0;
        let mut chars = token.chars();
        while let Some(c) = chars.next() {
            match c {
                '\\' => { chars.next(); }
                '#' => unescaped += 1,
                _ => {}
            }
        }
        prop_assert_eq!(unescaped, usize::from(n.text.is_some()));
    }

    #[test]
    fn tokens_are_injective(a in common::leaf(), b in common::leaf()) {
        if node_token(&a) == node_token(&b) {
            prop_assert_eq!((&a.label, &a.text), (&b.label, &b.text));
        }
    }
}

#[test]
fn escaped_text_survives_round_trip() {
    let t = parse_mathml(r"<math><mi>a#b</mi></math>").unwrap();
    assert_eq!(node_token(&t.root), r"mi#a\#b");
    assert_eq!(node_token(&ExprNode::leaf("mi", r"a\ b")), r"mi#a\\\_b");
}
