//! Merging two template components into a more general one.
//!
//! Patterns are abstracted top-down from the roots; contexts bottom-up from
//! paired leaves. Node pairs fall into four cases: identical nodes are kept,
//! nodes differing only in value get a value hole, nodes differing in type
//! but sharing a base type become a type hole, and anything else is removed.

use std::collections::{BTreeMap, BTreeSet};

use crate::metrics::{context_distance, leaf_chain, MatchKind, NodeMatching};
use crate::template::{
    ExternalContext, FixPattern, InternalContext, Slot, Subtree, TemplateNode, TemplateTree,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("abstraction removed both pattern trees")]
pub struct ResultEmptyPattern;

/// Outcome of abstracting one node pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeAbstraction {
    Same(TemplateNode),
    Value(TemplateNode),
    Type(TemplateNode),
    Removed,
}

impl NodeAbstraction {
    /// Whether the children (or parents) of the pair are still visited.
    pub fn continues(&self) -> bool {
        matches!(self, NodeAbstraction::Same(_) | NodeAbstraction::Value(_))
    }

    pub fn node(&self) -> Option<&TemplateNode> {
        match self {
            NodeAbstraction::Same(n) | NodeAbstraction::Value(n) | NodeAbstraction::Type(n) => Some(n),
            NodeAbstraction::Removed => None,
        }
    }
}

pub fn abstract_node(a: &TemplateNode, b: &TemplateNode) -> NodeAbstraction {
    if a == b {
        NodeAbstraction::Same(a.clone())
    } else if a.t == b.t && a.bt == b.bt {
        NodeAbstraction::Value(TemplateNode { bt: a.bt.clone(), t: a.t.clone(), v: Slot::Abs })
    } else if a.bt == b.bt && !a.bt.is_abs() {
        NodeAbstraction::Type(TemplateNode { bt: a.bt.clone(), t: Slot::Abs, v: Slot::Abs })
    } else {
        NodeAbstraction::Removed
    }
}

fn abstract_subtree(a: &Subtree, b: &Subtree) -> Option<Subtree> {
    let outcome = abstract_node(&a.node, &b.node);
    let node = outcome.node()?.clone();
    if !outcome.continues() {
        return Some(Subtree::leaf(node));
    }
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut children = Vec::new();
    for (rel, ca) in &a.children {
        let k = seen.entry(rel.as_str()).or_insert(0);
        let partner = b.children.iter().filter(|(r, _)| r == rel).nth(*k);
        *k += 1;
        if let Some((_, cb)) = partner {
            if let Some(c) = abstract_subtree(ca, cb) {
                children.push((rel.clone(), c));
            }
        }
    }
    Some(Subtree { node, children })
}

/// Top-down abstraction of two trees; children are paired positionally
/// within each relation up to the shorter list.
pub fn abstract_tree(t1: &TemplateTree, t2: &TemplateTree) -> TemplateTree {
    match (t1.to_subtree(), t2.to_subtree()) {
        (Some(a), Some(b)) => TemplateTree::from_subtree(abstract_subtree(&a, &b)),
        _ => TemplateTree::empty(),
    }
}

pub fn abstract_pattern(p1: &FixPattern, p2: &FixPattern) -> Result<FixPattern, ResultEmptyPattern> {
    let p = FixPattern::new(abstract_tree(&p1.before, &p2.before), abstract_tree(&p1.after, &p2.after));
    if p.is_empty() {
        Err(ResultEmptyPattern)
    } else {
        Ok(p)
    }
}

/// Leaf pairs driving context abstraction: the type-matching pairs of the
/// context distance, completed with leftover leaves paired in id order where
/// they fit the matching. Computed in the same canonical orientation as the
/// distance.
pub fn context_pairs(t1: &TemplateTree, t2: &TemplateTree) -> Vec<(usize, usize)> {
    if t1.hash() > t2.hash() {
        let mut pairs: Vec<(usize, usize)> = context_pairs(t2, t1).into_iter().map(|(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        return pairs;
    }
    let mut pairs = context_distance(t1, t2).pairs;
    let mut matching = NodeMatching::default();
    for &(a, b) in &pairs {
        matching.try_add(t1, t2, &leaf_chain(MatchKind::Type, t1, a, t2, b));
    }
    let used1: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    let mut used2: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
    for a in t1.leaves().into_iter().filter(|a| !used1.contains(a)) {
        for b in t2.leaves() {
            if !used2.contains(&b) && matching.try_add(t1, t2, &[(a, b)]) {
                used2.insert(b);
                pairs.push((a, b));
                break;
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Bottom-up abstraction of two context trees along paired leaves.
///
/// Each pair climbs towards the roots while the nodes are kept or
/// value-abstracted and hang under equal relations. A type-abstracted leaf
/// becomes a hole; a type-abstracted inner node ends the climb below it.
/// Chains are merged on shared ancestors and the largest connected piece is
/// returned together with the map from `t1` node ids to result ids.
pub fn abstract_context_tree(
    t1: &TemplateTree,
    t2: &TemplateTree,
    pairs: &[(usize, usize)],
) -> (TemplateTree, BTreeMap<usize, usize>) {
    let mut kept: BTreeMap<usize, TemplateNode> = BTreeMap::new();
    let mut parent_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut matching = NodeMatching::default();
    for &(a, b) in pairs {
        if a >= t1.len() || b >= t2.len() {
            continue;
        }
        let mut chain: Vec<(usize, usize, TemplateNode)> = Vec::new();
        let (mut x, mut y) = (a, b);
        loop {
            let outcome = abstract_node(t1.node(x), t2.node(y));
            let is_leaf = x == a;
            match outcome {
                NodeAbstraction::Type(n) if is_leaf => {
                    chain.push((x, y, n));
                    break;
                }
                o if o.continues() => chain.push((x, y, o.node().cloned().expect("kept node"))),
                _ => break,
            }
            if t1.relation(x) != t2.relation(y) {
                break;
            }
            match (t1.parent(x), t2.parent(y)) {
                (Some(p), Some(q)) => {
                    x = p;
                    y = q;
                }
                _ => break,
            }
        }
        let links: Vec<(usize, usize)> = chain.iter().map(|&(x, y, _)| (x, y)).collect();
        if chain.is_empty() || !matching.try_add(t1, t2, &links) {
            continue;
        }
        for w in chain.windows(2) {
            parent_of.insert(w[0].0, w[1].0);
        }
        for (x, _, n) in chain {
            let merged = match kept.remove(&x) {
                Some(old) => more_abstract(old, n),
                None => n,
            };
            kept.insert(x, merged);
        }
    }
    if kept.is_empty() {
        return (TemplateTree::empty(), BTreeMap::new());
    }

    let roots: Vec<usize> = kept.keys().copied().filter(|x| !parent_of.contains_key(x)).collect();
    let mut best: Option<(usize, TemplateTree, Vec<usize>)> = None;
    for r in roots {
        let mut order = Vec::new();
        let sub = assemble(r, t1, &kept, &parent_of, &mut order);
        let tree = TemplateTree::single(sub);
        let better = match &best {
            None => true,
            Some((size, t, _)) => tree.len() > *size || (tree.len() == *size && tree.hash() < t.hash()),
        };
        if better {
            best = Some((tree.len(), tree, order));
        }
    }
    let (_, tree, order) = best.expect("at least one root");
    let ids = order.into_iter().enumerate().map(|(new, old)| (old, new)).collect();
    (tree, ids)
}

fn more_abstract(a: TemplateNode, b: TemplateNode) -> TemplateNode {
    if a == b {
        return a;
    }
    TemplateNode {
        bt: if a.bt == b.bt { a.bt } else { Slot::Abs },
        t: if a.t == b.t { a.t } else { Slot::Abs },
        v: Slot::Abs,
    }
}

fn assemble(
    x: usize,
    t1: &TemplateTree,
    kept: &BTreeMap<usize, TemplateNode>,
    parent_of: &BTreeMap<usize, usize>,
    order: &mut Vec<usize>,
) -> Subtree {
    order.push(x);
    let mut sub = Subtree::leaf(kept[&x].clone());
    if sub.node.t.is_abs() {
        return sub;
    }
    let children: BTreeSet<usize> = parent_of.iter().filter(|(_, &p)| p == x).map(|(&c, _)| c).collect();
    for c in children {
        sub.children.push((t1.relation(c).to_string(), assemble(c, t1, kept, parent_of, order)));
    }
    sub
}

/// Abstraction of internal contexts. The attachment survives when its node
/// survives and both contexts attach with the same relations; otherwise the
/// result is the empty context.
pub fn abstract_internal(c1: &InternalContext, c2: &InternalContext, pairs: &[(usize, usize)]) -> InternalContext {
    let (tree, ids) = abstract_context_tree(&c1.tree, &c2.tree, pairs);
    if tree.is_empty() {
        return InternalContext::empty();
    }
    let (Some((n1, a1)), Some((_, a2))) = (c1.attachment(), c2.attachment()) else {
        return InternalContext { tree, rn: BTreeMap::new() };
    };
    match ids.get(&n1) {
        Some(&new) if a1 == a2 => InternalContext { tree, rn: BTreeMap::from([(new, a1.clone())]) },
        _ => InternalContext::empty(),
    }
}

/// Abstraction of external contexts, tree by tree.
pub fn abstract_external(
    c1: &ExternalContext,
    c2: &ExternalContext,
    before_pairs: &[(usize, usize)],
    after_pairs: &[(usize, usize)],
) -> ExternalContext {
    ExternalContext {
        before: abstract_context_tree(&c1.before, &c2.before, before_pairs).0,
        after: abstract_context_tree(&c1.after, &c2.after, after_pairs).0,
    }
}
