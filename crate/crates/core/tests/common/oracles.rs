//! Reference implementations the library is checked against. They favour
//! obviousness over speed and share no code with the library beyond the
//! tree accessors.

use std::collections::BTreeMap;

use tyfix_core::template::{Attachment, FixTemplate, Slot, Subtree, TemplateNode, TemplateTree};

use super::trees::by_relation;

/// Top-down match count: two per matched pair, children paired by position
/// within each relation.
pub fn naive_pattern_count(a: &Subtree, b: &Subtree, by_type: bool) -> usize {
    let same = if by_type { a.node.t == b.node.t } else { a.node == b.node };
    if !same {
        return 0;
    }
    let rb = by_relation(b);
    let mut total = 2;
    for (r, xs) in by_relation(a) {
        if let Some((_, ys)) = rb.iter().find(|(q, _)| *q == r) {
            for (x, y) in xs.iter().zip(ys) {
                total += naive_pattern_count(x, y, by_type);
            }
        }
    }
    total
}

/// Value and structural pattern distance by plain recursion.
pub fn naive_pattern_distance(a: &TemplateTree, b: &TemplateTree) -> (f64, f64) {
    naive_subtree_distance(a.to_subtree().as_ref(), b.to_subtree().as_ref())
}

pub fn naive_subtree_distance(a: Option<&Subtree>, b: Option<&Subtree>) -> (f64, f64) {
    match (a, b) {
        (Some(x), Some(y)) => {
            let n = (x.size() + y.size()) as f64;
            (1.0 - naive_pattern_count(x, y, false) as f64 / n, 1.0 - naive_pattern_count(x, y, true) as f64 / n)
        }
        _ => (1.0, 1.0),
    }
}

fn ancestor(t: &TemplateTree, a: usize, mut n: usize) -> bool {
    while let Some(p) = t.parent(n) {
        if p == a {
            return true;
        }
        n = p;
    }
    false
}

fn same(t1: &TemplateTree, a: usize, t2: &TemplateTree, b: usize, by_type: bool) -> bool {
    if by_type {
        t1.node(a).t == t2.node(b).t
    } else {
        t1.node(a) == t2.node(b)
    }
}

fn chain(t1: &TemplateTree, a: usize, t2: &TemplateTree, b: usize, by_type: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let (mut x, mut y) = (Some(a), Some(b));
    while let (Some(i), Some(j)) = (x, y) {
        if !same(t1, i, t2, j, by_type) || t1.relation(i) != t2.relation(j) {
            break;
        }
        out.push((i, j));
        x = t1.parent(i);
        y = t2.parent(j);
    }
    out
}

/// Whether a set of node pairs is a one-to-one map that keeps preorder and
/// ancestry in both directions.
pub fn consistent(t1: &TemplateTree, t2: &TemplateTree, pairs: &[(usize, usize)]) -> bool {
    for &(a, b) in pairs {
        for &(x, y) in pairs {
            if (a == x) != (b == y) || (a < x) != (b < y) {
                return false;
            }
            if ancestor(t1, a, x) != ancestor(t2, b, y) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy)]
pub struct ContextOptimum {
    /// Best achievable score, two per matched node pair.
    pub best: usize,
    /// Number of maximal consistent sets of leaf pairs.
    pub maximal_sets: usize,
}

/// Exhaustive search over sets of leaf pairs whose climbed chains form a
/// consistent matching.
pub fn context_optimum(t1: &TemplateTree, t2: &TemplateTree, by_type: bool) -> ContextOptimum {
    let mut cands = Vec::new();
    for a in t1.leaves() {
        for b in t2.leaves() {
            let c = chain(t1, a, t2, b, by_type);
            if !c.is_empty() {
                cands.push(c);
            }
        }
    }
    let mut result = ContextOptimum { best: 0, maximal_sets: 0 };
    let mut chosen = vec![false; cands.len()];
    search(t1, t2, &cands, 0, &mut chosen, &mut Vec::new(), &mut result);
    result
}

fn union_with(current: &[(usize, usize)], extra: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut u = current.to_vec();
    for p in extra {
        if !u.contains(p) {
            u.push(*p);
        }
    }
    u
}

fn search(
    t1: &TemplateTree,
    t2: &TemplateTree,
    cands: &[Vec<(usize, usize)>],
    i: usize,
    chosen: &mut Vec<bool>,
    current: &mut Vec<(usize, usize)>,
    result: &mut ContextOptimum,
) {
    if i == cands.len() {
        let maximal = (0..cands.len()).all(|j| chosen[j] || !consistent(t1, t2, &union_with(current, &cands[j])));
        if maximal {
            result.maximal_sets += 1;
        }
        result.best = result.best.max(2 * current.len());
        return;
    }
    let grown = union_with(current, &cands[i]);
    if consistent(t1, t2, &grown) {
        chosen[i] = true;
        let mut next = grown;
        search(t1, t2, cands, i + 1, chosen, &mut next, result);
        chosen[i] = false;
    }
    search(t1, t2, cands, i + 1, chosen, current, result);
}

fn slot_ok<T: PartialEq>(n: &Slot<T>, p: &Slot<T>) -> bool {
    matches!(p, Slot::Abs) || n == p
}

fn node_ok(n: &TemplateNode, p: &TemplateNode) -> bool {
    slot_ok(&n.bt, &p.bt) && slot_ok(&n.t, &p.t) && slot_ok(&n.v, &p.v)
}

/// Backtracking embedding of `p` at the root of `t`: pattern children go to
/// an increasing sequence of same-relation children of `t`.
pub fn embeds_at(t: &Subtree, p: &Subtree) -> bool {
    node_ok(&t.node, &p.node) && assign(&t.children, 0, &p.children, 0)
}

fn assign(tc: &[(String, Subtree)], i: usize, pc: &[(String, Subtree)], j: usize) -> bool {
    if j == pc.len() {
        return true;
    }
    (i..tc.len()).any(|k| tc[k].0 == pc[j].0 && embeds_at(&tc[k].1, &pc[j].1) && assign(tc, k + 1, pc, j + 1))
}

fn embeds_below(t: &Subtree, p: &Subtree) -> bool {
    embeds_at(t, p) || t.children.iter().any(|(_, c)| embeds_below(c, p))
}

/// Whether `p` embeds anywhere in `t`; the empty pattern embeds everywhere.
pub fn embeds(t: &TemplateTree, p: &TemplateTree) -> bool {
    match (t.to_subtree(), p.to_subtree()) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(t), Some(p)) => embeds_below(&t, &p),
    }
}

/// Rendering of a tree independent of node numbering and of the order in
/// which relations are listed; `marks` annotates nodes by id.
pub fn canonical_tree(t: &TemplateTree, marks: &BTreeMap<usize, String>) -> String {
    fn walk(t: &TemplateTree, i: usize, marks: &BTreeMap<usize, String>, out: &mut String) {
        out.push_str(&format!("({:?}", t.node(i)));
        if let Some(m) = marks.get(&i) {
            out.push_str(&format!(" @{m}"));
        }
        let mut kids: Vec<usize> = t.children(i).to_vec();
        kids.sort_by(|&a, &b| t.relation(a).cmp(t.relation(b)));
        for c in kids {
            out.push_str(&format!(" {}:", t.relation(c)));
            walk(t, c, marks, out);
        }
        out.push(')');
    }
    let mut out = String::new();
    if let Some(r) = t.root() {
        walk(t, r, marks, &mut out);
    }
    out
}

pub fn canonical_template(t: &FixTemplate) -> String {
    let none = BTreeMap::new();
    let rn: BTreeMap<usize, String> = t.ic.rn.iter().map(|(&n, Attachment { br, ar })| (n, format!("{br}/{ar}"))).collect();
    format!(
        "P[{} => {}] IC[{}] EC[{} | {}]",
        canonical_tree(&t.pattern.before, &none),
        canonical_tree(&t.pattern.after, &none),
        canonical_tree(&t.ic.tree, &rn),
        canonical_tree(&t.ec.before, &none),
        canonical_tree(&t.ec.after, &none),
    )
}
