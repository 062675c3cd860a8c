//! Bottom-up distances between context trees.

use std::collections::BTreeMap;

use super::pattern::MatchKind;
use super::DistanceReport;
use crate::template::{ExternalContext, TemplateTree};

/// Node pairs climbed from the leaf pair `(a, b)`: a pair is taken while
/// the nodes match and hang under the same relation, then the walk moves to
/// the parents.
pub fn leaf_chain(kind: MatchKind, t1: &TemplateTree, a: usize, t2: &TemplateTree, b: usize) -> Vec<(usize, usize)> {
    let mut chain = Vec::new();
    let (mut x, mut y) = (a, b);
    loop {
        if !kind.nodes_match(t1, x, t2, y) || t1.relation(x) != t2.relation(y) {
            break;
        }
        chain.push((x, y));
        match (t1.parent(x), t2.parent(y)) {
            (Some(p), Some(q)) => {
                x = p;
                y = q;
            }
            _ => break,
        }
    }
    chain
}

/// A set of node pairs that can be grown chain by chain while staying a
/// consistent partial mapping between the two trees.
#[derive(Clone, Debug, Default)]
pub struct NodeMatching {
    forward: BTreeMap<usize, usize>,
    backward: BTreeMap<usize, usize>,
}

impl NodeMatching {
    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward.iter().map(|(&a, &b)| (a, b))
    }

    /// Adds every pair of `chain` if the result stays injective both ways,
    /// preserves preorder and preserves ancestry. Returns whether it did.
    pub fn try_add(&mut self, t1: &TemplateTree, t2: &TemplateTree, chain: &[(usize, usize)]) -> bool {
        let mut fresh = Vec::new();
        for &(a, b) in chain {
            match (self.forward.get(&a), self.backward.get(&b)) {
                (Some(&y), _) if y != b => return false,
                (_, Some(&x)) if x != a => return false,
                (Some(_), _) => {}
                (None, None) => fresh.push((a, b)),
                (None, Some(_)) => return false,
            }
        }
        for (i, &(a, b)) in fresh.iter().enumerate() {
            let others = self.pairs().chain(fresh[..i].iter().copied());
            for (x, y) in others {
                if (a < x) != (b < y) {
                    return false;
                }
                if t1.is_ancestor_of(a, x) != t2.is_ancestor_of(b, y) || t1.is_ancestor_of(x, a) != t2.is_ancestor_of(y, b) {
                    return false;
                }
            }
        }
        for (a, b) in fresh {
            self.forward.insert(a, b);
            self.backward.insert(b, a);
        }
        true
    }
}

/// A leaf pair and the node pairs climbed from it.
type LeafCandidate = (usize, usize, Vec<(usize, usize)>);

/// Leaf count per tree up to which the matching is searched exhaustively.
pub const EXACT_LEAVES: usize = 8;

/// Search steps allowed before the best matching found so far is kept.
const SEARCH_BUDGET: usize = 200_000;

/// Leaf matching with the most matched node pairs. Candidate leaf pairs are
/// ordered by descending chain length, ties by leaf ids. Small trees are
/// searched exhaustively, starting from the greedy choice; larger ones keep
/// the greedy matching, which takes every candidate that does not conflict.
pub(crate) fn best_matching(kind: MatchKind, t1: &TemplateTree, t2: &TemplateTree) -> (NodeMatching, Vec<(usize, usize)>) {
    let (l1, l2) = (t1.leaves(), t2.leaves());
    let mut candidates: Vec<LeafCandidate> = Vec::new();
    for &a in &l1 {
        for &b in &l2 {
            let chain = leaf_chain(kind, t1, a, t2, b);
            if !chain.is_empty() {
                candidates.push((a, b, chain));
            }
        }
    }
    candidates.sort_by(|x, y| y.2.len().cmp(&x.2.len()).then((x.0, x.1).cmp(&(y.0, y.1))));
    let mut best = Search { matching: NodeMatching::default(), leaf_pairs: Vec::new(), steps: 0, found: false };
    if l1.len() <= EXACT_LEAVES && l2.len() <= EXACT_LEAVES {
        let rest: Vec<usize> = suffix_bounds(&candidates);
        best.run(t1, t2, &candidates, &rest, 0, NodeMatching::default(), &mut Vec::new());
    } else {
        for (a, b, chain) in &candidates {
            if best.matching.try_add(t1, t2, chain) {
                best.leaf_pairs.push((*a, *b));
            }
        }
    }
    best.leaf_pairs.sort_unstable();
    (best.matching, best.leaf_pairs)
}

/// Upper bound on the pairs still obtainable from each candidate onwards.
fn suffix_bounds(candidates: &[LeafCandidate]) -> Vec<usize> {
    let mut out = vec![0; candidates.len() + 1];
    for i in (0..candidates.len()).rev() {
        out[i] = out[i + 1] + candidates[i].2.len();
    }
    out
}

struct Search {
    matching: NodeMatching,
    leaf_pairs: Vec<(usize, usize)>,
    steps: usize,
    found: bool,
}

impl Search {
    /// Depth-first over candidates, taking before skipping, so the first
    /// complete matching reached is the greedy one and only strictly better
    /// ones replace it.
    #[allow(clippy::too_many_arguments)]
    fn run(
        &mut self,
        t1: &TemplateTree,
        t2: &TemplateTree,
        candidates: &[LeafCandidate],
        rest: &[usize],
        i: usize,
        current: NodeMatching,
        chosen: &mut Vec<(usize, usize)>,
    ) {
        self.steps += 1;
        if i == candidates.len() {
            if !self.found || current.len() > self.matching.len() {
                self.matching = current;
                self.leaf_pairs = chosen.clone();
                self.found = true;
            }
            return;
        }
        if self.found && (current.len() + rest[i] <= self.matching.len() || self.steps > SEARCH_BUDGET) {
            return;
        }
        let (a, b, chain) = &candidates[i];
        let mut grown = current.clone();
        if grown.try_add(t1, t2, chain) {
            chosen.push((*a, *b));
            self.run(t1, t2, candidates, rest, i + 1, grown, chosen);
            chosen.pop();
        }
        self.run(t1, t2, candidates, rest, i + 1, current, chosen);
    }
}

/// Score of a matching: two per matched node pair.
pub(crate) fn score(m: &NodeMatching) -> usize {
    2 * m.len()
}

fn oriented(t1: &TemplateTree, t2: &TemplateTree) -> bool {
    t1.hash() <= t2.hash()
}

/// Matched score and leaf pairs for `kind`, computed in a canonical
/// orientation so that the result does not depend on argument order.
pub(crate) fn context_match(kind: MatchKind, t1: &TemplateTree, t2: &TemplateTree) -> (usize, Vec<(usize, usize)>) {
    if oriented(t1, t2) {
        let (m, pairs) = best_matching(kind, t1, t2);
        (score(&m), pairs)
    } else {
        let (m, pairs) = best_matching(kind, t2, t1);
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().map(|(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        (score(&m), pairs)
    }
}

/// Value and structural distance of two context trees. The returned pairs
/// are the leaf pairs of the type matching. Two empty trees are identical.
pub fn context_distance(t1: &TemplateTree, t2: &TemplateTree) -> DistanceReport {
    let total = t1.len() + t2.len();
    if total == 0 {
        return DistanceReport { d: 0.0, sd: 0.0, pairs: Vec::new() };
    }
    let (vm, _) = context_match(MatchKind::Value, t1, t2);
    let (tm, pairs) = context_match(MatchKind::Type, t1, t2);
    DistanceReport { d: 1.0 - vm as f64 / total as f64, sd: 1.0 - tm as f64 / total as f64, pairs }
}

/// Distances of external contexts, with scores and node counts of the
/// before trees and after trees combined. Pairs are those of the before
/// trees followed by those of the after trees; see [`ec_pairs`].
pub fn external_context_distance(c1: &ExternalContext, c2: &ExternalContext) -> DistanceReport {
    let total = c1.before.len() + c2.before.len() + c1.after.len() + c2.after.len();
    if total == 0 {
        return DistanceReport { d: 0.0, sd: 0.0, pairs: Vec::new() };
    }
    let (vb, _) = context_match(MatchKind::Value, &c1.before, &c2.before);
    let (va, _) = context_match(MatchKind::Value, &c1.after, &c2.after);
    let (tb, _) = context_match(MatchKind::Type, &c1.before, &c2.before);
    let (ta, _) = context_match(MatchKind::Type, &c1.after, &c2.after);
    DistanceReport {
        d: 1.0 - (vb + va) as f64 / total as f64,
        sd: 1.0 - (tb + ta) as f64 / total as f64,
        pairs: Vec::new(),
    }
}

/// Type-matching leaf pairs of the before and after trees.
pub fn ec_pairs(c1: &ExternalContext, c2: &ExternalContext) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    (
        context_match(MatchKind::Type, &c1.before, &c2.before).1,
        context_match(MatchKind::Type, &c1.after, &c2.after).1,
    )
}
