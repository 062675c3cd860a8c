//! Applying a fix template to a buggy program.

use std::collections::{BTreeMap, BTreeSet};

use crate::matcher::{node_matches, BuggyProgramView};
use crate::syntax::{Fragment, NodeId, NodeValue, SyntaxTree, STATEMENT_RELATIONS};
use crate::template::{concat, FixTemplate, Slot, TemplateTree};

/// Upper bound on the embeddings tried per template.
pub const MAX_EMBEDDINGS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ApplyError {
    #[error("template {0} matched the program but no edit site was found")]
    NoMatchSite(String),
    #[error("template {template}: cannot complete `{kind}` into a valid node")]
    GrammarViolation { template: String, kind: String },
}

/// Children a node kind cannot do without, with their minimum counts.
const REQUIRED: &[(&str, &[(&str, usize)])] = &[
    ("Assign", &[("targets", 1), ("value", 1)]),
    ("AugAssign", &[("target", 1), ("op", 1), ("value", 1)]),
    ("AnnAssign", &[("target", 1), ("annotation", 1)]),
    ("For", &[("target", 1), ("iter", 1)]),
    ("AsyncFor", &[("target", 1), ("iter", 1)]),
    ("While", &[("test", 1)]),
    ("If", &[("test", 1)]),
    ("With", &[("items", 1)]),
    ("AsyncWith", &[("items", 1)]),
    ("withitem", &[("context_expr", 1)]),
    ("Assert", &[("test", 1)]),
    ("Expr", &[("value", 1)]),
    ("Attribute", &[("value", 1)]),
    ("Subscript", &[("value", 1), ("slice", 1)]),
    ("Call", &[("func", 1)]),
    ("keyword", &[("value", 1)]),
    ("Starred", &[("value", 1)]),
    ("ListComp", &[("elt", 1), ("generators", 1)]),
    ("SetComp", &[("elt", 1), ("generators", 1)]),
    ("GeneratorExp", &[("elt", 1), ("generators", 1)]),
    ("DictComp", &[("key", 1), ("value", 1), ("generators", 1)]),
    ("comprehension", &[("target", 1), ("iter", 1)]),
    ("NamedExpr", &[("target", 1), ("value", 1)]),
    ("Await", &[("value", 1)]),
    ("YieldFrom", &[("value", 1)]),
    ("Compare", &[("left", 1), ("ops", 1), ("comparators", 1)]),
    ("BoolOp", &[("op", 1), ("values", 2)]),
    ("BinOp", &[("left", 1), ("op", 1), ("right", 1)]),
    ("UnaryOp", &[("op", 1), ("operand", 1)]),
    ("Lambda", &[("body", 1)]),
    ("IfExp", &[("test", 1), ("body", 1), ("orelse", 1)]),
    ("FormattedValue", &[("value", 1)]),
];

fn required(kind: &str) -> &'static [(&'static str, usize)] {
    REQUIRED.iter().find(|(k, _)| *k == kind).map_or(&[], |(_, r)| r)
}

/// Adds hole children for required relations that are missing or short, and
/// pads the operator and operand lists of comparisons to equal length.
pub fn complete_required(frag: &mut Fragment) {
    for (_, c) in frag.children.iter_mut() {
        complete_required(c);
    }
    if frag.kind == crate::syntax::HOLE_KIND {
        return;
    }
    for &(rel, min) in required(&frag.kind) {
        let have = frag.children.iter().filter(|(r, _)| r == rel).count();
        for _ in have..min {
            frag.children.push((rel.to_string(), Fragment::hole()));
        }
    }
    if frag.kind == "Compare" {
        let ops = frag.children.iter().filter(|(r, _)| r == "ops").count();
        let cmps = frag.children.iter().filter(|(r, _)| r == "comparators").count();
        for _ in cmps..ops {
            frag.children.push(("comparators".to_string(), Fragment::hole()));
        }
        for _ in ops..cmps {
            let at = frag.children.iter().position(|(r, _)| r == "comparators").unwrap_or(frag.children.len());
            frag.children.insert(at, ("ops".to_string(), Fragment::hole()));
        }
        // Interleave: left, op, comparator, op, comparator, ...
        let (left, rest): (Vec<_>, Vec<_>) = std::mem::take(&mut frag.children).into_iter().partition(|(r, _)| r == "left");
        let (ops, cmps): (Vec<_>, Vec<_>) = rest.into_iter().partition(|(r, _)| r == "ops");
        frag.children = left;
        for (o, c) in ops.into_iter().zip(cmps) {
            frag.children.push(o);
            frag.children.push(c);
        }
    }
}

/// All embeddings of `pat` into `tree`, as maps from pattern node to tree
/// node, in a canonical order; at most `cap` of them.
pub fn embeddings(tree: &TemplateTree, pat: &TemplateTree, cap: usize) -> Vec<Vec<usize>> {
    let Some(proot) = pat.root() else { return Vec::new() };
    let mut out = Vec::new();
    for a in 0..tree.len() {
        if out.len() >= cap {
            break;
        }
        for m in embed_at(tree, a, pat, proot, cap - out.len()) {
            let mut full = vec![usize::MAX; pat.len()];
            for (p, t) in m {
                full[p] = t;
            }
            out.push(full);
        }
    }
    out
}

fn embed_at(tree: &TemplateTree, a: usize, pat: &TemplateTree, b: usize, cap: usize) -> Vec<Vec<(usize, usize)>> {
    if cap == 0 || !node_matches(tree.node(a), pat.node(b)) {
        return Vec::new();
    }
    let mut partial: Vec<(usize, Vec<(usize, usize)>)> = vec![(0, vec![(b, a)])];
    let candidates = tree.children(a);
    for &pc in pat.children(b) {
        let mut next = Vec::new();
        for (pos, m) in &partial {
            for (k, &c) in candidates.iter().enumerate().skip(*pos) {
                if tree.relation(c) != pat.relation(pc) {
                    continue;
                }
                for sub in embed_at(tree, c, pat, pc, cap) {
                    if next.len() >= cap {
                        break;
                    }
                    let mut m2 = m.clone();
                    m2.extend(sub);
                    next.push((k + 1, m2));
                }
            }
        }
        if next.is_empty() {
            return Vec::new();
        }
        partial = next;
    }
    partial.into_iter().map(|(_, m)| m).take(cap).collect()
}

/// How the template's fixed side enters the program.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Edit {
    /// Replace `images` (siblings under `parent`/`relation`) with the fixed side.
    Replace { parent: NodeId, relation: String, images: Vec<NodeId> },
    /// Insert next to `anchor` in its list, or append under `parent`.
    Insert { parent: NodeId, relation: String, at: InsertAt },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum InsertAt {
    Before(NodeId),
    After(NodeId),
    End,
}

/// One way of applying a template: the modified program and where the
/// change went.
#[derive(Clone, Debug)]
pub struct Application {
    pub tree: SyntaxTree,
    /// Program nodes the fixed side replaced or was inserted next to.
    pub site: Vec<NodeId>,
}

/// Applies `tpl` at every match site in the view's bug statements. Each
/// application is an independent edit; identical results are kept once.
pub fn apply_template(view: &BuggyProgramView, program: &SyntaxTree, tpl: &FixTemplate) -> Result<Vec<Application>, ApplyError> {
    let buggy_side = concat(&tpl.ic.tree, &tpl.pattern.before, &tpl.ic.rn);
    let b_members = pattern_members(&tpl.pattern.before);
    let attach = tpl.ic.attachment().map(|(n, a)| (n, a.br.clone()));

    let mut edits: Vec<(Edit, BTreeMap<usize, NodeId>)> = Vec::new();
    if buggy_side.is_empty() {
        // Statement-level addition without any context: next to the site.
        let (Some(&first), Some(&last)) = (view.site.first(), view.site.last()) else {
            return Err(ApplyError::NoMatchSite(tpl.id.clone()));
        };
        for (anchor, at) in [(first, InsertAt::Before(first)), (last, InsertAt::After(last))] {
            let parent = program.node(anchor).parent.ok_or_else(|| ApplyError::NoMatchSite(tpl.id.clone()))?;
            let relation = program.relation_of(anchor).unwrap_or("body").to_string();
            edits.push((Edit::Insert { parent, relation, at }, BTreeMap::new()));
        }
    } else {
        for m in embeddings(&view.bug, &buggy_side, MAX_EMBEDDINGS) {
            let image = |i: usize| view.origin.get(m[i]).copied().flatten();
            // Node ids of the before tree inside the joined tree.
            let (offset_parent, member_ids): (Option<usize>, Vec<usize>) = match &attach {
                Some((n, _)) if !tpl.ic.tree.is_empty() => {
                    let kids = buggy_side.children(*n);
                    (Some(*n), kids[kids.len() - b_members.len()..].to_vec())
                }
                _ if tpl.pattern.before.root_node().is_some_and(|r| r.is_group()) => (Some(0), buggy_side.children(0).to_vec()),
                _ => (None, vec![0]),
            };
            let mut b_images = BTreeMap::new();
            for (k, &member) in member_ids.iter().enumerate() {
                let b_root = b_members[k];
                for off in 0..buggy_side.subtree_end(member) - member {
                    if let Some(img) = image(member + off) {
                        b_images.insert(b_root + off, img);
                    }
                }
            }
            let edit = if member_ids.is_empty() {
                // Addition under an internal context.
                let Some(parent) = offset_parent.and_then(image) else { continue };
                let relation = attach.as_ref().map_or("body".to_string(), |(_, r)| r.clone());
                Edit::Insert { parent, relation, at: InsertAt::End }
            } else {
                let images: Option<Vec<NodeId>> = member_ids.iter().map(|&i| image(i)).collect();
                let Some(images) = images else { continue };
                let parent = program.node(images[0]).parent;
                let relation = program.relation_of(images[0]).map(str::to_string);
                let (Some(parent), Some(relation)) = (parent, relation) else { continue };
                if images.iter().any(|&i| program.node(i).parent != Some(parent) || program.relation_of(i) != Some(&relation)) {
                    continue;
                }
                Edit::Replace { parent, relation, images }
            };
            edits.push((edit, b_images));
        }
    }
    if edits.is_empty() {
        return Err(ApplyError::NoMatchSite(tpl.id.clone()));
    }

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (edit, b_images) in edits {
        let replacement = fixed_fragments(tpl, program, &b_images)?;
        let root = rebuild(program, program.root(), &edit, &replacement);
        let tree = SyntaxTree::from_fragment(&root);
        let key = format!("{:?}", root);
        if seen.insert(key) {
            let site = match &edit {
                Edit::Replace { images, .. } => images.clone(),
                Edit::Insert { at: InsertAt::Before(a) | InsertAt::After(a), .. } => vec![*a],
                Edit::Insert { parent, .. } => vec![*parent],
            };
            out.push(Application { tree, site });
        }
    }
    Ok(out)
}

/// Roots of the before tree's members: the children of a group root, or
/// the root itself.
fn pattern_members(t: &TemplateTree) -> Vec<usize> {
    match t.root_node() {
        None => Vec::new(),
        Some(r) if r.is_group() => t.children(0).to_vec(),
        Some(_) => vec![0],
    }
}

/// The fixed side as program fragments, copying from the program the
/// subtrees chosen by [`copy_plan`].
fn fixed_fragments(tpl: &FixTemplate, program: &SyntaxTree, b_images: &BTreeMap<usize, NodeId>) -> Result<Vec<Fragment>, ApplyError> {
    let a = &tpl.pattern.after;
    let b = &tpl.pattern.before;
    let plan = copy_plan(a, b);
    let build = |i: usize| -> Result<Fragment, ApplyError> {
        let mut f = to_fragment(a, i, &plan, program, b_images, &tpl.id)?;
        complete_required(&mut f);
        Ok(f)
    };
    match a.root_node() {
        None => Ok(Vec::new()),
        Some(r) if r.is_group() => a.children(0).iter().map(|&c| build(c)).collect(),
        Some(_) => Ok(vec![build(0)?]),
    }
}

/// Nodes of the fixed side to be copied from the program, with the buggy
/// side node whose image supplies the text. Each buggy statement or
/// expression that reappears whole is copied at its last occurrence; then
/// the two sides are walked top-down in parallel and any equal pair of
/// subtrees at the same position is copied too.
fn copy_plan(a: &TemplateTree, b: &TemplateTree) -> BTreeMap<usize, usize> {
    let mut plan: BTreeMap<usize, usize> = BTreeMap::new();
    let covered = |plan: &BTreeMap<usize, usize>, i: usize| plan.keys().any(|&k| k == i || a.is_ancestor_of(k, i) || a.is_ancestor_of(i, k));
    for j in pattern_members(b) {
        if let Some(i) = (0..a.len()).rev().find(|&i| !covered(&plan, i) && !a.node(i).is_group() && a.subtree_eq(i, b, j)) {
            plan.insert(i, j);
        }
    }
    let (a_units, b_units) = (pattern_members(a), pattern_members(b));
    let mut stack: Vec<(usize, usize)> = a_units.into_iter().zip(b_units).collect();
    while let Some((i, j)) = stack.pop() {
        if plan.keys().any(|&k| k == i || a.is_ancestor_of(k, i)) {
            continue;
        }
        if a.subtree_eq(i, b, j) && !covered(&plan, i) {
            plan.insert(i, j);
            continue;
        }
        if a.node(i).t != b.node(j).t {
            continue;
        }
        let mut by_rel: BTreeMap<&str, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for &c in a.children(i) {
            by_rel.entry(a.relation(c)).or_default().0.push(c);
        }
        for &c in b.children(j) {
            by_rel.entry(b.relation(c)).or_default().1.push(c);
        }
        for (xs, ys) in by_rel.values() {
            stack.extend(xs.iter().copied().zip(ys.iter().copied()));
        }
    }
    plan
}

fn to_fragment(
    a: &TemplateTree,
    i: usize,
    plan: &BTreeMap<usize, usize>,
    program: &SyntaxTree,
    b_images: &BTreeMap<usize, NodeId>,
    id: &str,
) -> Result<Fragment, ApplyError> {
    if let Some(img) = plan.get(&i).and_then(|j| b_images.get(j)) {
        return Ok(program.to_fragment(*img));
    }
    let node = a.node(i);
    let Slot::Val(kind) = &node.t else { return Ok(Fragment::hole()) };
    if node.is_group() {
        return Err(ApplyError::GrammarViolation { template: id.to_string(), kind: kind.clone() });
    }
    let value = match &node.v {
        Slot::Abs => NodeValue::Hole,
        Slot::Val(None) => NodeValue::None,
        Slot::Val(Some(s)) => NodeValue::Text(s.clone()),
    };
    let mut f = Fragment::new(kind.clone(), value);
    for &c in a.children(i) {
        f.children.push((a.relation(c).to_string(), to_fragment(a, c, plan, program, b_images, id)?));
    }
    Ok(f)
}

/// Copies the program with `edit` applied, keeping child order.
fn rebuild(program: &SyntaxTree, id: NodeId, edit: &Edit, replacement: &[Fragment]) -> Fragment {
    let node = program.node(id);
    let mut frag = Fragment::new(node.kind.clone(), node.value.clone());
    let (target, relation) = match edit {
        Edit::Replace { parent, relation, .. } | Edit::Insert { parent, relation, .. } => (*parent, relation.as_str()),
    };
    let push_all = |frag: &mut Fragment| {
        for r in replacement {
            frag.children.push((relation.to_string(), r.clone()));
        }
    };
    let mut placed = false;
    for c in &node.children {
        if id == target && c.relation == relation {
            match edit {
                Edit::Replace { images, .. } if images.contains(&c.id) => {
                    if !placed {
                        push_all(&mut frag);
                        placed = true;
                    }
                    continue;
                }
                Edit::Insert { at: InsertAt::Before(a), .. } if *a == c.id => {
                    push_all(&mut frag);
                    placed = true;
                }
                _ => {}
            }
        }
        frag.children.push((c.relation.clone(), rebuild(program, c.id, edit, replacement)));
        if id == target && !placed && matches!(edit, Edit::Insert { at: InsertAt::After(a), .. } if *a == c.id) {
            push_all(&mut frag);
            placed = true;
        }
    }
    if id == target && !placed {
        // Appending: after the last child of the relation, or at the end.
        let at = frag.children.iter().rposition(|(r, _)| r == relation).map_or(frag.children.len(), |p| p + 1);
        let tail = frag.children.split_off(at);
        push_all(&mut frag);
        frag.children.extend(tail);
    }
    if id == target && relation == STATEMENT_RELATIONS[0] && !frag.children.iter().any(|(r, _)| r == relation) {
        frag.children.push(("body".to_string(), Fragment::new("Pass", NodeValue::None)));
    }
    frag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fix_parser::{analyze_fix, FixInstance, DEFAULT_WINDOW};
    use crate::syntax::{parse_source, unparse};
    use crate::template::BaseTypeTable;

    fn round_trip(buggy: &str, fixed: &str) -> Vec<String> {
        let parsed = analyze_fix(&FixInstance::from_sources("t", buggy, fixed), BaseTypeTable::builtin(), DEFAULT_WINDOW).unwrap();
        let view = BuggyProgramView::from_parsed(&parsed, DEFAULT_WINDOW, BaseTypeTable::builtin());
        let apps = apply_template(&view, &parsed.buggy, &parsed.template).unwrap();
        apps.iter().map(|a| unparse(&a.tree).unwrap()).collect()
    }

    fn normal(src: &str) -> String {
        unparse(&parse_source(src).unwrap()).unwrap()
    }

    #[test]
    fn specific_templates_reproduce_their_fix() {
        let cases = [
            ("x = f(y)\n", "x = g(f(y))\n"),
            ("def f(x):\n    x = str(x)\n    return x\n", "def f(x):\n    return x\n"),
            ("def f(x):\n    x = load(x)\n    return x.name\n", "def f(x):\n    x = load(x)\n    if x is None:\n        return None\n    return x.name\n"),
            ("if a < b < c:\n    pass\n", "if a < b < int(c):\n    pass\n"),
            ("f()\n", "f(x)\n"),
            ("y = {'a': 1, 'b': 2}\n", "y = {'a': 1, 'b': str(2)}\n"),
            ("def f(x):\n    return x\n", "def f(x):\n    pass\n"),
        ];
        for (b, f) in cases {
            let outs = round_trip(b, f);
            assert!(outs.contains(&normal(f)), "{b:?} -> {outs:?}");
        }
    }

    #[test]
    fn wrapped_argument_is_copied_and_callee_masked() {
        use crate::abstraction::abstract_pattern;
        let t1 = analyze_fix(&FixInstance::from_sources("a", "s = a\n", "s = to_bytes(a)\n"), BaseTypeTable::builtin(), 3).unwrap();
        let t2 = analyze_fix(&FixInstance::from_sources("b", "s = b\n", "s = to_native(b)\n"), BaseTypeTable::builtin(), 3).unwrap();
        let mut tpl = t1.template.clone();
        tpl.pattern = abstract_pattern(&t1.template.pattern, &t2.template.pattern).unwrap();
        let program = parse_source("s = user\n").unwrap();
        let view = BuggyProgramView::from_statements(&program, &[program.node(program.root()).children[0].id], 3, BaseTypeTable::builtin());
        let apps = apply_template(&view, &program, &tpl).unwrap();
        let texts: Vec<String> = apps.iter().map(|a| crate::syntax::unparse_with_holes(&a.tree, |k| format!("<{k}>")).unwrap()).collect();
        assert_eq!(texts, ["s = <0>(user)\n"]);
    }

    #[test]
    fn required_children_become_holes() {
        let mut call = Fragment::new("Call", NodeValue::None);
        complete_required(&mut call);
        assert_eq!(call.count_holes(), 1);
        let mut cmp = Fragment::new("Compare", NodeValue::None)
            .with_child("left", Fragment::new("Name", NodeValue::Text("a".into())))
            .with_child("ops", Fragment::new("Lt", NodeValue::Text("<".into())))
            .with_child("ops", Fragment::new("Lt", NodeValue::Text("<".into())));
        complete_required(&mut cmp);
        let rels: Vec<&str> = cmp.children.iter().map(|(r, _)| r.as_str()).collect();
        assert_eq!(rels, ["left", "ops", "comparators", "ops", "comparators"]);
    }

    #[test]
    fn embeddings_enumerate_choices() {
        let t = crate::template::tree::tests::expr_tree("x = f(a, a)\n");
        let p = crate::template::tree::tests::expr_tree("x = a\n");
        assert_eq!(embeddings(&t, &p, 10).len(), 2);
        assert_eq!(embeddings(&t, &p, 1).len(), 1);
    }
}
