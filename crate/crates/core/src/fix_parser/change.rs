//! Locating the changed statements and splitting them into pattern and
//! internal context.

use std::collections::BTreeMap;

use crate::syntax::{NodeId, SyntaxTree, STATEMENT_RELATIONS};
use crate::template::{
    Attachment, BaseTypeTable, FixPattern, InternalContext, InvalidPattern, Subtree, TemplateTree,
};

/// Relations the alignment may descend through.
const DESCENT_RELATIONS: &[&str] = &["body", "orelse", "finalbody", "handlers"];

/// The deepest statement run where the two versions differ: `buggy` in the
/// buggy tree and `fixed` in the fixed tree, both under `relation` of their
/// parent and starting at the given positions. Everything outside the runs is
/// identical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub buggy_parent: NodeId,
    pub fixed_parent: NodeId,
    pub relation: String,
    pub buggy_index: usize,
    pub fixed_index: usize,
    pub buggy: Vec<NodeId>,
    pub fixed: Vec<NodeId>,
}

/// Aligns the statement lists of both trees top-down and returns the region
/// of change, or `None` when the trees are structurally identical.
///
/// At each list the common prefix and suffix are stripped. When a single
/// statement remains on both sides, with the same kind and value, and its
/// only difference lies in one nonempty statement list, the alignment
/// descends into that list. Exception handlers are crossed but never form a
/// region themselves; the enclosing `try` is reported instead.
pub fn align(buggy: &SyntaxTree, fixed: &SyntaxTree) -> Option<Region> {
    let mut levels: Vec<Region> = Vec::new();
    let (mut bp, mut fp, mut rel) = (buggy.root(), fixed.root(), "body".to_string());
    loop {
        let lb: Vec<NodeId> = buggy.node(bp).children_in(&rel).collect();
        let lf: Vec<NodeId> = fixed.node(fp).children_in(&rel).collect();
        let (p, s) = common_ends(&lb, &lf, |a, b| buggy.subtree_eq(a, fixed, b));
        let region = Region {
            buggy_parent: bp,
            fixed_parent: fp,
            relation: rel.clone(),
            buggy_index: p,
            fixed_index: p,
            buggy: lb[p..lb.len() - s].to_vec(),
            fixed: lf[p..lf.len() - s].to_vec(),
        };
        if region.buggy.is_empty() && region.fixed.is_empty() {
            return levels.pop();
        }
        let descend = match (region.buggy.as_slice(), region.fixed.as_slice()) {
            ([x], [y]) if same_root(buggy, *x, fixed, *y) => match differing_relations(buggy, *x, fixed, *y).as_slice() {
                [r] if DESCENT_RELATIONS.contains(&r.as_str())
                    && buggy.node(*x).child(r).is_some()
                    && fixed.node(*y).child(r).is_some() =>
                {
                    Some((*x, *y, r.clone()))
                }
                _ => None,
            },
            _ => None,
        };
        levels.push(region);
        match descend {
            Some((x, y, r)) => {
                bp = x;
                fp = y;
                rel = r;
            }
            None => break,
        }
    }
    while levels.last().is_some_and(|r| !STATEMENT_RELATIONS.contains(&r.relation.as_str())) {
        levels.pop();
    }
    levels.pop()
}

/// Lengths of the common prefix and suffix; together they never exceed the
/// shorter list.
fn common_ends<T: Copy>(a: &[T], b: &[T], eq: impl Fn(T, T) -> bool) -> (usize, usize) {
    let min = a.len().min(b.len());
    let mut p = 0;
    while p < min && eq(a[p], b[p]) {
        p += 1;
    }
    let mut s = 0;
    while s < min - p && eq(a[a.len() - 1 - s], b[b.len() - 1 - s]) {
        s += 1;
    }
    (p, s)
}

fn same_root(a: &SyntaxTree, x: NodeId, b: &SyntaxTree, y: NodeId) -> bool {
    a.node(x).kind == b.node(y).kind && a.node(x).value == b.node(y).value
}

fn relations_in_order<'a>(lists: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in lists {
        if !out.iter().any(|o| o == r) {
            out.push(r.to_string());
        }
    }
    out
}

fn differing_relations(a: &SyntaxTree, x: NodeId, b: &SyntaxTree, y: NodeId) -> Vec<String> {
    let rels = relations_in_order(
        a.node(x).children.iter().chain(&b.node(y).children).map(|c| c.relation.as_str()),
    );
    rels.into_iter()
        .filter(|r| {
            let ca: Vec<NodeId> = a.node(x).children_in(r).collect();
            let cb: Vec<NodeId> = b.node(y).children_in(r).collect();
            ca.len() != cb.len() || ca.iter().zip(&cb).any(|(&p, &q)| !a.subtree_eq(p, b, q))
        })
        .collect()
}

/// Template tree of a statement run: the single statement, or a group of
/// them, or the empty tree.
pub fn run_tree(tree: &SyntaxTree, run: &[NodeId], table: &BaseTypeTable) -> TemplateTree {
    let items = run
        .iter()
        .filter_map(|&id| TemplateTree::from_syntax(tree, id, table).0.to_subtree())
        .collect();
    TemplateTree::from_subtree(Subtree::group(items))
}

/// Decides between a statement-level and an expression-level edit.
///
/// Statement level (empty internal context) applies when either tree is
/// empty or a group, when the roots differ, or when more than one child
/// relation changed. Otherwise the shared root becomes the internal context,
/// identical children are pruned and the differing middle of the single
/// changed relation becomes the pattern. When that middle is empty on the
/// buggy side of a nonempty list, one unchanged neighbour is kept on both
/// sides so that the edit stays anchored.
pub fn split_level(bug: &TemplateTree, fix: &TemplateTree) -> Result<(FixPattern, InternalContext), InvalidPattern> {
    let statement_level = || Ok((FixPattern::new(bug.clone(), fix.clone()), InternalContext::empty()));
    let (Some(b), Some(f)) = (bug.to_subtree(), fix.to_subtree()) else {
        if bug.is_empty() && fix.is_empty() {
            return Err(InvalidPattern);
        }
        return statement_level();
    };
    if b.node != f.node || b.node.is_group() {
        return statement_level();
    }
    let rels = relations_in_order(b.children.iter().chain(&f.children).map(|(r, _)| r.as_str()));
    let of = |s: &Subtree, r: &str| -> Vec<Subtree> {
        s.children.iter().filter(|(rel, _)| rel == r).map(|(_, c)| c.clone()).collect()
    };
    let differing: Vec<&String> = rels.iter().filter(|r| of(&b, r) != of(&f, r)).collect();
    let [rel] = differing.as_slice() else { return statement_level() };
    let (lb, lf) = (of(&b, rel), of(&f, rel));
    let (mut p, mut s) = common_ends(&(0..lb.len()).collect::<Vec<_>>(), &(0..lf.len()).collect::<Vec<_>>(), |i, j| {
        lb[i] == lf[j]
    });
    if p + s == lb.len() && !lb.is_empty() {
        if p > 0 {
            p -= 1;
        } else {
            s -= 1;
        }
    }
    let before = TemplateTree::from_subtree(Subtree::group(lb[p..lb.len() - s].to_vec()));
    let after = TemplateTree::from_subtree(Subtree::group(lf[p..lf.len() - s].to_vec()));
    let mut rn = BTreeMap::new();
    rn.insert(0, Attachment { br: rel.to_string(), ar: rel.to_string() });
    let ic = InternalContext { tree: TemplateTree::single(b.clone_without_children()), rn };
    Ok((FixPattern::new(before, after), ic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_source;
    use crate::template::Category;
    use crate::template::category_of;

    fn region(a: &str, b: &str) -> (SyntaxTree, SyntaxTree, Option<Region>) {
        let (x, y) = (parse_source(a).unwrap(), parse_source(b).unwrap());
        let r = align(&x, &y);
        (x, y, r)
    }

    #[test]
    fn align_finds_if_statement() {
        let buggy = "def f(value):\n    value = boolean(value, strict=False)\n    if isinstance(value, string_types):\n        pass\n";
        let fixed = "def f(value):\n    value = boolean(value, strict=False)\n    if isinstance(to_native(value), string_types):\n        pass\n";
        let (x, _, r) = region(buggy, fixed);
        let r = r.unwrap();
        assert_eq!(r.buggy.len(), 1);
        assert_eq!(x.node(r.buggy[0]).kind, "If");
        assert_eq!(x.node(r.buggy_parent).kind, "FunctionDef");
        assert_eq!(r.buggy_index, 1);
    }

    #[test]
    fn align_descends_into_bodies() {
        let buggy = "for x in y:\n    if x:\n        a = 1\n        b = 2\n";
        let fixed = "for x in y:\n    if x:\n        a = 1\n        b = str(2)\n";
        let (x, _, r) = region(buggy, fixed);
        let r = r.unwrap();
        assert_eq!(x.node(r.buggy[0]).kind, "Assign");
        assert_eq!(r.buggy_index, 1);
    }

    #[test]
    fn align_pure_insertion() {
        let (_, y, r) = region("def f(x):\n    return x.a\n", "def f(x):\n    if x is None:\n        return None\n    return x.a\n");
        let r = r.unwrap();
        assert!(r.buggy.is_empty());
        assert_eq!(r.buggy_index, 0);
        assert_eq!(y.node(r.fixed[0]).kind, "If");
    }

    #[test]
    fn align_handler_body_reports_statement() {
        let buggy = "try:\n    f()\nexcept ValueError:\n    x = 1\n";
        let fixed = "try:\n    f()\nexcept ValueError:\n    x = str(1)\n";
        let (x, _, r) = region(buggy, fixed);
        assert_eq!(x.node(r.unwrap().buggy[0]).kind, "Assign");
        let buggy = "try:\n    f()\nexcept ValueError:\n    pass\n";
        let fixed = "try:\n    f()\nexcept (ValueError, TypeError):\n    pass\n";
        let (x, _, r) = region(buggy, fixed);
        assert_eq!(x.node(r.unwrap().buggy[0]).kind, "Try");
    }

    #[test]
    fn identical_sources_have_no_region() {
        assert!(region("x = 1\n", "x = 1\n").2.is_none());
        assert!(region("x = 1\n", "x=1  # same\n").2.is_none());
    }

    fn trees(a: &str, b: &str) -> (TemplateTree, TemplateTree) {
        let (x, y, r) = region(a, b);
        let r = r.unwrap();
        let table = BaseTypeTable::builtin();
        (run_tree(&x, &r.buggy, table), run_tree(&y, &r.fixed, table))
    }

    #[test]
    fn expression_level_condition_edit() {
        let (b, f) = trees(
            "if isinstance(value, string_types):\n    pass\n",
            "if isinstance(to_native(value), string_types):\n    pass\n",
        );
        let (p, ic) = split_level(&b, &f).unwrap();
        assert_eq!(ic.tree.len(), 1);
        assert_eq!(ic.tree.node(0).kind(), Some("If"));
        assert_eq!(ic.attachment().unwrap().1.br, "test");
        assert_eq!(p.before.node(0).kind(), Some("Call"));
        assert_eq!(category_of(&p), Ok(Category::Replace));
    }

    #[test]
    fn wrapping_is_insert() {
        let (b, f) = trees(
            "user_pass = '%s:%s' % (unquote(user), unquote(password))\n",
            "user_pass = to_bytes('%s:%s' % (unquote(user), unquote(password)))\n",
        );
        let (p, ic) = split_level(&b, &f).unwrap();
        assert_eq!(ic.attachment().unwrap().1.ar, "value");
        assert_eq!(category_of(&p), Ok(Category::Insert));
    }

    #[test]
    fn statement_replacement_has_empty_context() {
        let (b, f) = trees("def f(x):\n    y = x\n", "def f(x):\n    return x\n");
        let (p, ic) = split_level(&b, &f).unwrap();
        assert!(ic.is_empty());
        assert_eq!(p.before.node(0).kind(), Some("Assign"));
    }

    #[test]
    fn added_argument_keeps_a_neighbour() {
        let (b, f) = trees("f(a)\n", "f(a, b)\n");
        // The changed relation is inside the Expr statement's value.
        let (p, ic) = split_level(&b, &f).unwrap();
        assert!(ic.tree.node(0).kind() == Some("Expr"));
        assert_eq!(p.before.node(0).kind(), Some("Call"));
        let (b, f) = trees("f()\n", "f(x)\n");
        let (p, _) = split_level(&b, &f).unwrap();
        assert_eq!(category_of(&p), Ok(Category::Insert));
    }

    #[test]
    fn empty_list_gains_member() {
        let b = TemplateTree::from_subtree(trees("x = f()\n", "x = f(1)\n").0.to_subtree());
        let call = b.subtree(b.children(0)[1]);
        let (_, f) = trees("x = f()\n", "x = f(1)\n");
        let fcall = f.subtree(f.children(0)[1]);
        let (p, ic) = split_level(&TemplateTree::single(call), &TemplateTree::single(fcall)).unwrap();
        assert!(p.before.is_empty());
        assert_eq!(ic.attachment().unwrap().1.br, "args");
        assert_eq!(category_of(&p), Ok(Category::Add));
    }

    #[test]
    fn group_statements_are_statement_level() {
        let (b, f) = trees("a = 1\nb = 2\n", "a = 2\nb = 3\n");
        assert!(b.node(0).is_group());
        let (_, ic) = split_level(&b, &f).unwrap();
        assert!(ic.is_empty());
    }
}
