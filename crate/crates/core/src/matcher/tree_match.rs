//! Matching template trees against concrete (or less abstract) trees.

use crate::template::{Slot, TemplateNode, TemplateTree};

/// Whether `pat` admits `node`: every concrete attribute of `pat` must be
/// present and equal in `node`.
pub fn node_matches(node: &TemplateNode, pat: &TemplateNode) -> bool {
    fn slot<T: PartialEq>(n: &Slot<T>, p: &Slot<T>) -> bool {
        p.is_abs() || n == p
    }
    slot(&node.bt, &pat.bt) && slot(&node.t, &pat.t) && slot(&node.v, &pat.v)
}

/// Embedding of the pattern subtree at `b` onto the tree subtree at `a`:
/// the roots match and the pattern's children map, in order and relation by
/// relation, onto a subsequence of `a`'s children.
pub fn matches_at(tree: &TemplateTree, a: usize, pat: &TemplateTree, b: usize) -> bool {
    if !node_matches(tree.node(a), pat.node(b)) {
        return false;
    }
    let candidates = tree.children(a);
    let mut pos = 0;
    'outer: for &pc in pat.children(b) {
        while pos < candidates.len() {
            let c = candidates[pos];
            pos += 1;
            if tree.relation(c) == pat.relation(pc) && matches_at(tree, c, pat, pc) {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Nodes of `tree` at which `pat` embeds. The empty pattern embeds at the
/// root of any tree (and nowhere in the empty tree).
pub fn match_sites(tree: &TemplateTree, pat: &TemplateTree) -> Vec<usize> {
    match pat.root() {
        None => tree.root().into_iter().collect(),
        Some(r) => (0..tree.len()).filter(|&a| matches_at(tree, a, pat, r)).collect(),
    }
}

/// Whether `pat` embeds somewhere in `tree`. The empty pattern always does.
pub fn tree_matches(tree: &TemplateTree, pat: &TemplateTree) -> bool {
    match pat.root() {
        None => true,
        Some(r) => (0..tree.len()).any(|a| matches_at(tree, a, pat, r)),
    }
}

/// Whether `pat` embeds at the root of `tree`.
pub fn root_matches(tree: &TemplateTree, pat: &TemplateTree) -> bool {
    match (tree.root(), pat.root()) {
        (_, None) => true,
        (Some(a), Some(b)) => matches_at(tree, a, pat, b),
        (None, Some(_)) => false,
    }
}
