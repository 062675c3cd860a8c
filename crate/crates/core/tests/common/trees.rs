//! Tree generators and reference predicates over owned subtrees.

use rand::rngs::StdRng;
use rand::Rng;
use tyfix_core::template::{BaseType, Slot, Subtree, TemplateNode, TemplateTree};

pub const KINDS: [&str; 3] = ["A", "B", "C"];
pub const RELATIONS: [&str; 2] = ["a", "b"];

pub fn kind_node(k: usize) -> TemplateNode {
    TemplateNode::new(BaseType::Expr, KINDS[k], None)
}

fn random_node(rng: &mut StdRng) -> TemplateNode {
    let bt = if rng.gen_bool(0.5) { BaseType::Expr } else { BaseType::Variable };
    let v = match rng.gen_range(0..3) {
        0 => Slot::Val(Some("x".to_string())),
        1 => Slot::Val(Some("y".to_string())),
        _ => Slot::Abs,
    };
    TemplateNode { bt: Slot::Val(bt), t: Slot::Val(KINDS[rng.gen_range(0..3)].to_string()), v }
}

struct Raw {
    node: TemplateNode,
    kids: Vec<(usize, usize)>,
}

fn build(raw: &[Raw], i: usize) -> Subtree {
    let mut kids = raw[i].kids.clone();
    // Syntax nodes keep each relation's children together, relations in a
    // fixed order.
    kids.sort_by_key(|&(r, _)| r);
    kids.into_iter().fold(Subtree::leaf(raw[i].node.clone()), |s, (r, c)| s.with(RELATIONS[r], build(raw, c)))
}

/// A random tree of exactly `n` nodes, each new node hung under a uniformly
/// chosen earlier one.
pub fn random_tree(rng: &mut StdRng, n: usize) -> TemplateTree {
    if n == 0 {
        return TemplateTree::empty();
    }
    let mut raw = vec![Raw { node: random_node(rng), kids: Vec::new() }];
    for i in 1..n {
        let p = rng.gen_range(0..i);
        raw[p].kids.push((rng.gen_range(0..RELATIONS.len()), i));
        raw.push(Raw { node: random_node(rng), kids: Vec::new() });
    }
    TemplateTree::single(build(&raw, 0))
}

/// A random tree with at most `max_leaves` leaves and `max_nodes` nodes.
pub fn random_tree_leaves(rng: &mut StdRng, max_nodes: usize, max_leaves: usize) -> TemplateTree {
    loop {
        let n = rng.gen_range(1..=max_nodes);
        let t = random_tree(rng, n);
        if t.leaves().len() <= max_leaves {
            return t;
        }
    }
}

/// A copy of `t` with one node attribute changed, or `t` itself.
pub fn mutate(rng: &mut StdRng, t: &TemplateTree) -> TemplateTree {
    let Some(mut s) = t.to_subtree() else { return t.clone() };
    if rng.gen_bool(0.3) {
        return t.clone();
    }
    let target = rng.gen_range(0..t.len());
    let mut count = 0;
    let fresh = random_node(rng);
    let by_type = rng.gen_bool(0.5);
    edit(&mut s, target, &mut count, &|n: &mut TemplateNode| {
        if by_type {
            n.t = fresh.t.clone();
        } else {
            n.v = fresh.v.clone();
        }
    });
    TemplateTree::single(s)
}

fn edit(s: &mut Subtree, target: usize, count: &mut usize, f: &dyn Fn(&mut TemplateNode)) {
    if *count == target {
        f(&mut s.node);
    }
    *count += 1;
    for (_, c) in &mut s.children {
        edit(c, target, count, f);
    }
}

/// Ordered tree shapes with `n` nodes, as child lists.
#[derive(Clone, Debug)]
pub struct Shape(pub Vec<Shape>);

pub fn shapes(n: usize) -> Vec<Shape> {
    forests(n - 1).into_iter().map(Shape).collect()
}

fn forests(m: usize) -> Vec<Vec<Shape>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for k in 1..=m {
        for first in shapes(k) {
            for rest in forests(m - k) {
                let mut f = vec![first.clone()];
                f.extend(rest);
                out.push(f);
            }
        }
    }
    out
}

fn size(s: &Shape) -> usize {
    1 + s.0.iter().map(size).sum::<usize>()
}

fn label(s: &Shape, labels: &[usize], pos: &mut usize) -> Subtree {
    let node = kind_node(labels[*pos]);
    *pos += 1;
    s.0.iter().fold(Subtree::leaf(node), |acc, c| {
        let child = label(c, labels, pos);
        acc.with(RELATIONS[0], child)
    })
}

/// Every tree of one to `max_nodes` nodes over the three kinds, one relation.
pub fn exhaustive(max_nodes: usize) -> Vec<TemplateTree> {
    let mut out = Vec::new();
    for n in 1..=max_nodes {
        for shape in shapes(n) {
            let k = size(&shape);
            for code in 0..KINDS.len().pow(k as u32) {
                let labels: Vec<usize> = (0..k).map(|i| code / KINDS.len().pow(i as u32) % KINDS.len()).collect();
                out.push(TemplateTree::single(label(&shape, &labels, &mut 0)));
            }
        }
    }
    out
}

/// Children of `s` keyed by relation, in first-appearance order.
pub fn by_relation(s: &Subtree) -> Vec<(&str, Vec<&Subtree>)> {
    let mut out: Vec<(&str, Vec<&Subtree>)> = Vec::new();
    for (r, c) in &s.children {
        match out.iter_mut().find(|(x, _)| x == r) {
            Some((_, v)) => v.push(c),
            None => out.push((r, vec![c])),
        }
    }
    out
}

/// Equality of trees whose children are keyed by relation: per relation the
/// child lists agree position by position.
pub fn keyed_eq(a: &Subtree, b: &Subtree, by_type: bool) -> bool {
    let same = if by_type { a.node.t == b.node.t } else { a.node == b.node };
    if !same {
        return false;
    }
    let (ra, rb) = (by_relation(a), by_relation(b));
    ra.len() == rb.len()
        && ra.iter().all(|(r, xs)| match rb.iter().find(|(q, _)| q == r) {
            Some((_, ys)) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| keyed_eq(x, y, by_type)),
            None => false,
        })
}

pub fn trees_keyed_eq(a: &TemplateTree, b: &TemplateTree, by_type: bool) -> bool {
    match (a.to_subtree(), b.to_subtree()) {
        (Some(x), Some(y)) => keyed_eq(&x, &y, by_type),
        (None, None) => true,
        _ => false,
    }
}
