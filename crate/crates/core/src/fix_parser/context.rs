//! External contexts: statements around an edit site that share variables
//! with the fix pattern.

use std::collections::BTreeSet;

use crate::syntax::{NodeId, SyntaxTree, STATEMENT_RELATIONS};
use crate::template::{BaseType, BaseTypeTable, ExternalContext, FixPattern, Subtree, TemplateTree};

/// Statements considered on each side of the site.
pub const DEFAULT_WINDOW: usize = 3;

const SCOPE_KINDS: &[&str] = &["Module", "FunctionDef", "AsyncFunctionDef", "ClassDef"];

/// Up to `window` statements before the first and after the last site
/// statement, nearest first, returned in source order. The search climbs
/// into enclosing statement lists until it reaches a function, class or
/// module scope.
pub fn context_window(tree: &SyntaxTree, site: &[NodeId], window: usize) -> (Vec<NodeId>, Vec<NodeId>) {
    let (Some(&first), Some(&last)) = (site.first(), site.last()) else {
        return (Vec::new(), Vec::new());
    };
    let mut before = collect(tree, first, window, true);
    before.reverse();
    (before, collect(tree, last, window, false))
}

fn collect(tree: &SyntaxTree, start: NodeId, window: usize, backwards: bool) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut cur = start;
    while out.len() < window {
        if tree.relation_of(cur).is_some_and(|r| STATEMENT_RELATIONS.contains(&r)) {
            if let Some((sibs, pos)) = tree.statement_siblings(cur) {
                let side: Vec<NodeId> =
                    if backwards { sibs[..pos].iter().rev().copied().collect() } else { sibs[pos + 1..].to_vec() };
                out.extend(side.into_iter().take(window - out.len()));
            }
        }
        match tree.node(cur).parent {
            Some(p) if !SCOPE_KINDS.contains(&tree.node(p).kind.as_str()) => cur = p,
            _ => break,
        }
    }
    out
}

/// Variable names the external context must share with the pattern: those of
/// the buggy side, or of the fixed side when nothing is removed.
pub fn shared_variables(pattern: &FixPattern) -> BTreeSet<String> {
    let source = if pattern.before.is_empty() { &pattern.after } else { &pattern.before };
    source.values_of(BaseType::Variable).into_iter().map(str::to_string).collect()
}

/// Drops every subtree without a shared variable. The callee of a kept call
/// is kept whole.
pub fn prune_to_variables(sub: &Subtree, vars: &BTreeSet<String>) -> Option<Subtree> {
    let is_shared =
        sub.node.base_type() == Some(BaseType::Variable) && sub.node.value().is_some_and(|v| vars.contains(v));
    let mut kept = Vec::new();
    for (rel, child) in &sub.children {
        if let Some(c) = prune_to_variables(child, vars) {
            kept.push((rel.clone(), c));
        }
    }
    if !is_shared && kept.is_empty() {
        return None;
    }
    if sub.node.kind() == Some("Call") {
        kept = sub
            .children
            .iter()
            .filter_map(|(rel, child)| {
                if rel == "func" {
                    Some((rel.clone(), child.clone()))
                } else {
                    prune_to_variables(child, vars).map(|c| (rel.clone(), c))
                }
            })
            .collect();
    }
    Some(Subtree { node: sub.node.clone(), children: kept })
}

fn context_tree(tree: &SyntaxTree, stmts: &[NodeId], vars: &BTreeSet<String>, table: &BaseTypeTable) -> TemplateTree {
    let items: Vec<Subtree> = stmts
        .iter()
        .filter_map(|&s| TemplateTree::from_syntax(tree, s, table).0.to_subtree())
        .filter_map(|s| prune_to_variables(&s, vars))
        .collect();
    TemplateTree::from_subtree(Subtree::group_always(items))
}

/// External context of an edit whose site statements are `site` in the
/// buggy tree.
pub fn build_external_context(
    tree: &SyntaxTree,
    site: &[NodeId],
    pattern: &FixPattern,
    window: usize,
    table: &BaseTypeTable,
) -> ExternalContext {
    let vars = shared_variables(pattern);
    if vars.is_empty() {
        return ExternalContext::empty();
    }
    let (before, after) = context_window(tree, site, window);
    ExternalContext {
        before: context_tree(tree, &before, &vars, table),
        after: context_tree(tree, &after, &vars, table),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_source;
    use crate::template::tree::tests::expr_tree;

    fn site_of(tree: &SyntaxTree, kind: &str) -> NodeId {
        tree.nodes().find(|(_, n)| n.kind == kind).unwrap().0
    }

    #[test]
    fn window_climbs_to_function_scope() {
        let src = "x = 0\ndef f(a):\n    b = 1\n    if a:\n        c = 2\n        return c\n    d = 3\n";
        let tree = parse_source(src).unwrap();
        let ret = site_of(&tree, "Return");
        let (before, after) = context_window(&tree, &[ret], 3);
        let kinds: Vec<u32> = before.iter().map(|&n| tree.node(n).span.start_line).collect();
        assert_eq!(kinds, vec![3, 5]);
        let after_lines: Vec<u32> = after.iter().map(|&n| tree.node(n).span.start_line).collect();
        assert_eq!(after_lines, vec![7]);
    }

    #[test]
    fn figure_like_context_prunes_keyword() {
        let src = "def f(value):\n    value = boolean(value, strict=False)\n    if isinstance(value, string_types):\n        pass\n    return 1\n";
        let tree = parse_source(src).unwrap();
        let site = site_of(&tree, "If");
        let before = expr_tree("x = isinstance(value, string_types)\n");
        let after = expr_tree("x = isinstance(to_native(value), string_types)\n");
        let ec = build_external_context(&tree, &[site], &FixPattern::new(before, after), 3, BaseTypeTable::builtin());
        assert!(ec.after.is_empty());
        let text = ec.before.pretty();
        assert!(text.contains("boolean"), "{text}");
        assert!(!text.contains("strict"), "{text}");
        assert!(ec.before.node(0).is_group());
    }

    #[test]
    fn literal_only_pattern_has_no_context() {
        let src = "a = 1\nb = 2\n";
        let tree = parse_source(src).unwrap();
        let site = tree.node(tree.root()).children[1].id;
        let p = FixPattern::new(expr_tree("x = 2\n"), expr_tree("x = '2'\n"));
        let ec = build_external_context(&tree, &[site], &p, 3, BaseTypeTable::builtin());
        assert!(ec.is_empty());
    }

    #[test]
    fn two_prior_statements_share_variable() {
        let src = "def g(v, w):\n    v = v.strip()\n    w = 0\n    v = int(v)\n    return v + 1\n";
        let tree = parse_source(src).unwrap();
        let site = site_of(&tree, "Return");
        let p = FixPattern::new(expr_tree("x = v + 1\n"), expr_tree("x = v + '1'\n"));
        let ec = build_external_context(&tree, &[site], &p, 3, BaseTypeTable::builtin());
        // Brute force: every statement of the function before the site that
        // mentions `v` as a name.
        let func = site_of(&tree, "FunctionDef");
        let expected: Vec<NodeId> = tree
            .node(func)
            .children_in("body")
            .filter(|&s| tree.node(s).span.start_line < tree.node(site).span.start_line)
            .filter(|&s| tree.descendants(s).iter().any(|&d| tree.node(d).kind == "Name" && tree.node(d).value.text() == Some("v")))
            .collect();
        assert_eq!(expected.len(), 2);
        assert_eq!(ec.before.children(0).len(), expected.len());
    }
}
