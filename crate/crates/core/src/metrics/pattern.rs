//! Top-down distances between fix-pattern trees.

use super::DistanceReport;
use crate::template::{FixPattern, TemplateTree};

/// Which node attributes two nodes must share to count as matching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatchKind {
    /// Base type, node type and value all equal.
    Value,
    /// Node type equal.
    Type,
}

impl MatchKind {
    pub(crate) fn nodes_match(self, a: &TemplateTree, i: usize, b: &TemplateTree, j: usize) -> bool {
        match self {
            MatchKind::Value => a.node(i) == b.node(j),
            MatchKind::Type => a.node(i).t == b.node(j).t,
        }
    }
}

/// Children of `i` grouped by relation, in first-appearance order.
pub(crate) fn children_by_relation(t: &TemplateTree, i: usize) -> Vec<(&str, Vec<usize>)> {
    let mut out: Vec<(&str, Vec<usize>)> = Vec::new();
    for &c in t.children(i) {
        let rel = t.relation(c);
        match out.iter_mut().find(|(r, _)| *r == rel) {
            Some((_, v)) => v.push(c),
            None => out.push((rel, vec![c])),
        }
    }
    out
}

/// Match count of the subtrees at `i` and `j`: zero when the nodes differ,
/// otherwise two plus the counts of the children paired positionally within
/// each relation.
pub fn top_down_match(kind: MatchKind, a: &TemplateTree, i: usize, b: &TemplateTree, j: usize) -> usize {
    if !kind.nodes_match(a, i, b, j) {
        return 0;
    }
    let right = children_by_relation(b, j);
    let mut total = 2;
    for (rel, left) in children_by_relation(a, i) {
        if let Some((_, r)) = right.iter().find(|(r, _)| *r == rel) {
            total += left.iter().zip(r).map(|(&x, &y)| top_down_match(kind, a, x, b, y)).sum::<usize>();
        }
    }
    total
}

fn tree_match(kind: MatchKind, a: &TemplateTree, b: &TemplateTree) -> usize {
    match (a.root(), b.root()) {
        (Some(i), Some(j)) => top_down_match(kind, a, i, b, j),
        _ => 0,
    }
}

fn ratio(matched: usize, total: usize) -> f64 {
    if total == 0 {
        1.0
    } else {
        1.0 - matched as f64 / total as f64
    }
}

/// Value and structural distance of two pattern trees. Two empty trees are
/// at distance one.
pub fn pattern_distance(t1: &TemplateTree, t2: &TemplateTree) -> DistanceReport {
    let total = t1.len() + t2.len();
    DistanceReport {
        d: ratio(tree_match(MatchKind::Value, t1, t2), total),
        sd: ratio(tree_match(MatchKind::Type, t1, t2), total),
        pairs: Vec::new(),
    }
}

/// Distance between two fix patterns: match counts and node counts of the
/// before trees and of the after trees are summed.
pub fn fix_pattern_distance(p1: &FixPattern, p2: &FixPattern) -> DistanceReport {
    let total = p1.before.len() + p2.before.len() + p1.after.len() + p2.after.len();
    let vm = tree_match(MatchKind::Value, &p1.before, &p2.before) + tree_match(MatchKind::Value, &p1.after, &p2.after);
    let tm = tree_match(MatchKind::Type, &p1.before, &p2.before) + tree_match(MatchKind::Type, &p1.after, &p2.after);
    DistanceReport { d: ratio(vm, total), sd: ratio(tm, total), pairs: Vec::new() }
}
