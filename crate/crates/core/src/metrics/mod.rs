//! Value and structural distances between template components.

pub mod context;
pub mod pattern;

use std::collections::HashMap;
use std::sync::Mutex;

use crate::template::{ExternalContext, FixPattern, InternalContext, TemplateTree, TreeHash};

pub use context::{context_distance, ec_pairs, external_context_distance, leaf_chain, NodeMatching};
pub use pattern::{fix_pattern_distance, pattern_distance, top_down_match, MatchKind};

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceReport {
    pub d: f64,
    pub sd: f64,
    /// Leaf pairs `(leaf in t1, leaf in t2)`; empty for pattern distances.
    pub pairs: Vec<(usize, usize)>,
}

/// Fraction of nodes whose type or value is a hole; one for the empty tree.
pub fn abstraction_ratio(t: &TemplateTree) -> f64 {
    if t.is_empty() {
        1.0
    } else {
        t.hole_count() as f64 / t.len() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Component {
    Pattern,
    Internal,
    External,
}

type Key = (Component, [TreeHash; 4]);

/// Memo of component distances keyed by the canonical hashes of the trees
/// involved. Safe to share between threads.
#[derive(Debug, Default)]
pub struct DistanceCache {
    map: Mutex<HashMap<Key, DistanceReport>>,
}

impl DistanceCache {
    pub fn new() -> Self {
        DistanceCache::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("distance cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_or(&self, key: Key, compute: impl FnOnce() -> DistanceReport) -> DistanceReport {
        if let Some(hit) = self.map.lock().expect("distance cache poisoned").get(&key) {
            return hit.clone();
        }
        let report = compute();
        self.map.lock().expect("distance cache poisoned").insert(key, report.clone());
        report
    }

    pub fn pattern(&self, p1: &FixPattern, p2: &FixPattern) -> DistanceReport {
        let key = [p1.before.hash(), p1.after.hash(), p2.before.hash(), p2.after.hash()];
        self.get_or((Component::Pattern, key), || fix_pattern_distance(p1, p2))
    }

    pub fn internal(&self, c1: &InternalContext, c2: &InternalContext) -> DistanceReport {
        let (h1, h2) = (c1.tree.hash(), c2.tree.hash());
        self.get_or((Component::Internal, [h1, h2, h1, h2]), || context_distance(&c1.tree, &c2.tree))
    }

    pub fn external(&self, c1: &ExternalContext, c2: &ExternalContext) -> DistanceReport {
        let key = [c1.before.hash(), c1.after.hash(), c2.before.hash(), c2.after.hash()];
        self.get_or((Component::External, key), || external_context_distance(c1, c2))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::template::tree::tests::{expr_tree, stmt_tree};
    use crate::template::{BaseType, Slot, Subtree, TemplateNode};

    /// Random template trees over a small alphabet, for property tests.
    pub(crate) fn arb_tree(max_nodes: u32) -> impl Strategy<Value = TemplateTree> {
        let leaf = (0..3u8, 0..3u8, 0..2u8).prop_map(|(k, v, bt)| Subtree::leaf(node(k, v, bt)));
        let sub = leaf.prop_recursive(4, max_nodes, 3, |inner| {
            ((0..3u8, 0..3u8, 0..2u8), prop::collection::vec((0..2u8, inner), 0..4)).prop_map(|((k, v, bt), mut kids)| {
                // Like syntax nodes, each relation's children are contiguous
                // and relations come in a fixed order.
                kids.sort_by_key(|(r, _)| *r);
                let mut s = Subtree::leaf(node(k, v, bt));
                for (r, c) in kids {
                    s = s.with(["a", "b"][r as usize], c);
                }
                s
            })
        });
        prop_oneof![1 => Just(TemplateTree::empty()), 12 => sub.prop_map(TemplateTree::single)]
    }

    fn node(k: u8, v: u8, bt: u8) -> TemplateNode {
        let bt = [BaseType::Expr, BaseType::Variable][bt as usize];
        let v = if v == 2 { Slot::Abs } else { Slot::Val(Some(["x", "y"][v as usize].to_string())) };
        TemplateNode { bt: Slot::Val(bt), t: Slot::Val(["A", "B", "C"][k as usize].to_string()), v }
    }

    #[test]
    fn identical_patterns_have_zero_distance() {
        let t = expr_tree("x = isinstance(value, string_types)\n");
        let r = pattern_distance(&t, &t);
        assert_eq!((r.d, r.sd), (0.0, 0.0));
    }

    #[test]
    fn single_nodes_sharing_type() {
        let a = TemplateTree::single(Subtree::leaf(TemplateNode::new(BaseType::Variable, "Name", Some("a".into()))));
        let b = TemplateTree::single(Subtree::leaf(TemplateNode::new(BaseType::Variable, "Name", Some("b".into()))));
        let r = pattern_distance(&a, &b);
        assert_eq!((r.d, r.sd), (1.0, 0.0));
    }

    #[test]
    fn renamed_leaf_pattern() {
        let a = expr_tree("x = isinstance(value, string_types)\n");
        let b = expr_tree("x = isinstance(value, text_types)\n");
        let r = pattern_distance(&a, &b);
        assert_eq!(r.sd, 0.0);
        // Call, func and first argument match by value: 3 pairs of 4 nodes.
        assert!((r.d - (1.0 - 6.0 / 8.0)).abs() < 1e-12);
    }

    #[test]
    fn empty_trees() {
        let e = TemplateTree::empty();
        assert_eq!(pattern_distance(&e, &e).d, 1.0);
        let c = context_distance(&e, &e);
        assert_eq!((c.d, c.sd), (0.0, 0.0));
        let t = stmt_tree("x = 1\n");
        let r = context_distance(&t, &e);
        assert_eq!((r.d, r.sd), (1.0, 1.0));
    }

    #[test]
    fn renamed_context_statement() {
        let a = stmt_tree("value = boolean(value)\n");
        let b = stmt_tree("other = boolean(other)\n");
        let r = context_distance(&a, &b);
        assert_eq!(r.sd, 0.0);
        // By value only the callee chain `boolean`, Call, Assign matches.
        assert!(r.d > 0.0 && r.d < 1.0);
        assert_eq!(r.pairs.len(), 3);
    }

    #[test]
    fn external_cross_pair_is_distance_one() {
        let t = stmt_tree("x = f(y)\n");
        let c1 = ExternalContext { before: t.clone(), after: TemplateTree::empty() };
        let c2 = ExternalContext { before: TemplateTree::empty(), after: t };
        assert_eq!(external_context_distance(&c1, &c2).d, 1.0);
        assert_eq!(external_context_distance(&c1, &c1).d, 0.0);
    }

    #[test]
    fn ratios() {
        assert_eq!(abstraction_ratio(&stmt_tree("x = f(y)\n")), 0.0);
        assert_eq!(abstraction_ratio(&TemplateTree::empty()), 1.0);
        let t = TemplateTree::single(
            Subtree::leaf(TemplateNode::new(BaseType::Expr, "Call", None))
                .with("func", Subtree::leaf(TemplateNode { v: Slot::Abs, ..TemplateNode::new(BaseType::Variable, "Name", None) }))
                .with("args", Subtree::leaf(TemplateNode::new(BaseType::Variable, "Name", Some("x".into())))),
        );
        assert!((abstraction_ratio(&t) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cache_reuses_results() {
        let cache = DistanceCache::new();
        let p = FixPattern::new(expr_tree("x = f(a)\n"), expr_tree("x = g(f(a))\n"));
        let q = FixPattern::new(expr_tree("x = f(b)\n"), expr_tree("x = g(f(b))\n"));
        let first = cache.pattern(&p, &q);
        assert_eq!(cache.len(), 1);
        assert_eq!(cache.pattern(&p, &q), first);
        assert_eq!(cache.len(), 1);
    }

    fn flat(root: &str, leaves: &[&str]) -> TemplateTree {
        let leaf = |k: &str| Subtree::leaf(TemplateNode::new(BaseType::Expr, k, None));
        TemplateTree::single(leaves.iter().fold(leaf(root), |s, k| s.with("b", leaf(k))))
    }

    #[test]
    fn context_matching_is_maximal_not_first_come() {
        // Taking the first C pair by id would cross the A pair.
        let (a, b) = (flat("R", &["C", "A", "C"]), flat("S", &["A", "C"]));
        let r = context_distance(&a, &b);
        assert_eq!(r.pairs, vec![(2, 1), (3, 2)]);
        assert!((r.sd - (1.0 - 4.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn wide_contexts_fall_back_to_greedy() {
        let mut kinds = vec!["C", "A", "C"];
        kinds.extend(["D"; context::EXACT_LEAVES]);
        let (a, b) = (flat("R", &kinds), flat("S", &["A", "C"]));
        assert_eq!(context_distance(&a, &b).pairs, vec![(1, 2)]);
    }

    /// Naive recursion over owned subtrees, independent of the arena walk.
    fn naive(a: &Subtree, b: &Subtree, by_type: bool) -> usize {
        let same = if by_type { a.node.t == b.node.t } else { a.node == b.node };
        if !same {
            return 0;
        }
        let mut total = 2;
        let mut rels: Vec<&String> = a.children.iter().map(|(r, _)| r).collect();
        rels.dedup();
        let mut seen = Vec::new();
        for r in rels {
            if seen.contains(&r) {
                continue;
            }
            seen.push(r);
            let ca: Vec<&Subtree> = a.children.iter().filter(|(x, _)| x == r).map(|(_, c)| c).collect();
            let cb: Vec<&Subtree> = b.children.iter().filter(|(x, _)| x == r).map(|(_, c)| c).collect();
            for i in 0..ca.len().min(cb.len()) {
                total += naive(ca[i], cb[i], by_type);
            }
        }
        total
    }

    proptest! {
        #[test]
        fn pattern_matches_naive(a in arb_tree(12), b in arb_tree(12)) {
            let r = pattern_distance(&a, &b);
            let n = (a.len() + b.len()) as f64;
            if let (Some(x), Some(y)) = (a.to_subtree(), b.to_subtree()) {
                prop_assert_eq!(r.d, 1.0 - naive(&x, &y, false) as f64 / n);
                prop_assert_eq!(r.sd, 1.0 - naive(&x, &y, true) as f64 / n);
            } else {
                prop_assert_eq!(r.d, 1.0);
            }
        }

        #[test]
        fn distances_are_symmetric_and_bounded(a in arb_tree(16), b in arb_tree(16)) {
            for (x, y) in [(pattern_distance(&a, &b), pattern_distance(&b, &a)), (context_distance(&a, &b), context_distance(&b, &a))] {
                prop_assert_eq!(x.d, y.d);
                prop_assert_eq!(x.sd, y.sd);
                prop_assert!((0.0..=1.0).contains(&x.d) && (0.0..=1.0).contains(&x.sd));
            }
        }

        #[test]
        fn zero_distance_means_identity(a in arb_tree(10), b in arb_tree(10)) {
            prop_assert_eq!(pattern_distance(&a, &b).d == 0.0, a == b && !a.is_empty());
            prop_assert_eq!(context_distance(&a, &b).d == 0.0, a == b);
            prop_assert_eq!(context_distance(&a, &a).d, 0.0);
        }
    }
}
