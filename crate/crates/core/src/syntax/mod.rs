//! Line-annotated syntax trees for Python source.
//!
//! Parsed programs are stored as an arena of [`SyntaxNode`]s in preorder, so a
//! node id is also its preorder rank. Node kinds and relation labels follow the
//! names of the reference `ast` module (`If`, `Call`, `test`, `body`, ...).
//! Operators are explicit leaf nodes (`Add`, `Eq`, ...) whose value is the
//! operator symbol.

mod literal;
mod parse;
mod unparse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use literal::{python_bytes_repr, python_float_repr, python_str_repr};
pub use parse::{parse_source, SyntaxError, GRAMMAR_VERSION};
pub use unparse::{unparse, unparse_with_holes, UnparseError, HOLE_PLACEHOLDER};

pub type NodeId = usize;

/// Kind of the synthetic node that stands for a whole missing subtree.
pub const HOLE_KIND: &str = "Hole";

/// Relation labels whose children are statements.
pub const STATEMENT_RELATIONS: &[&str] = &["body", "orelse", "finalbody"];

pub const STATEMENT_KINDS: &[&str] = &[
    "FunctionDef",
    "AsyncFunctionDef",
    "ClassDef",
    "Return",
    "Delete",
    "Assign",
    "AugAssign",
    "AnnAssign",
    "For",
    "AsyncFor",
    "While",
    "If",
    "With",
    "AsyncWith",
    "Raise",
    "Try",
    "Assert",
    "Import",
    "ImportFrom",
    "Global",
    "Nonlocal",
    "Expr",
    "Pass",
    "Break",
    "Continue",
];

pub fn is_statement_kind(kind: &str) -> bool {
    STATEMENT_KINDS.contains(&kind)
}

/// 1-based line/column span of a node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn hull(self, other: Span) -> Span {
        let (start_line, start_col) =
            (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let (end_line, end_col) = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        Span { start_line, start_col, end_line, end_col }
    }

    pub fn contains(&self, other: &Span) -> bool {
        (self.start_line, self.start_col) <= (other.start_line, other.start_col)
            && (other.end_line, other.end_col) <= (self.end_line, self.end_col)
    }

    pub fn covers_line(&self, line: u32) -> bool {
        self.start_line <= line && line <= self.end_line
    }

    pub fn lines(&self) -> SourceSpan {
        SourceSpan { start_line: self.start_line, end_line: self.end_line }
    }
}

/// Inclusive range of 1-based source lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start_line: u32,
    pub end_line: u32,
}

impl SourceSpan {
    pub fn new(start_line: u32, end_line: u32) -> Self {
        assert!(start_line >= 1 && start_line <= end_line, "invalid line span {start_line}:{end_line}");
        SourceSpan { start_line, end_line }
    }

    pub fn line(line: u32) -> Self {
        SourceSpan::new(line, line)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.start_line..=self.end_line
    }

    pub fn len(&self) -> usize {
        (self.end_line - self.start_line + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.end_line)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeValue {
    None,
    Text(String),
    /// Value hole: the node keeps its kind but the value is to be predicted.
    Hole,
}

impl NodeValue {
    pub fn text(&self) -> Option<&str> {
        match self {
            NodeValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Child {
    pub relation: String,
    pub id: NodeId,
}

#[derive(Clone, Debug)]
pub struct SyntaxNode {
    pub kind: String,
    pub value: NodeValue,
    pub children: Vec<Child>,
    pub parent: Option<NodeId>,
    pub span: Span,
}

impl SyntaxNode {
    pub fn is_statement(&self) -> bool {
        is_statement_kind(&self.kind)
    }

    pub fn is_hole(&self) -> bool {
        self.kind == HOLE_KIND
    }

    pub fn children_in<'a>(&'a self, relation: &'a str) -> impl Iterator<Item = NodeId> + 'a {
        self.children.iter().filter(move |c| c.relation == relation).map(|c| c.id)
    }

    pub fn child(&self, relation: &str) -> Option<NodeId> {
        self.children_in(relation).next()
    }
}

/// An owned, recursive node used to build replacement fragments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    pub kind: String,
    pub value: NodeValue,
    pub children: Vec<(String, Fragment)>,
}

impl Fragment {
    pub fn new(kind: impl Into<String>, value: NodeValue) -> Self {
        Fragment { kind: kind.into(), value, children: Vec::new() }
    }

    pub fn hole() -> Self {
        Fragment::new(HOLE_KIND, NodeValue::None)
    }

    pub fn with_child(mut self, relation: impl Into<String>, child: Fragment) -> Self {
        self.children.push((relation.into(), child));
        self
    }

    pub fn count_holes(&self) -> usize {
        let own = usize::from(self.kind == HOLE_KIND || self.value == NodeValue::Hole);
        own + self.children.iter().map(|(_, c)| c.count_holes()).sum::<usize>()
    }
}

/// One edit applied by [`SyntaxTree::splice`]: the children of `parent` under
/// `relation` at positions `start..end` (counted within that relation) are
/// replaced by `replacement`.
#[derive(Clone, Debug)]
pub struct Splice {
    pub parent: NodeId,
    pub relation: String,
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<Fragment>,
}

#[derive(Clone, Debug)]
pub struct SyntaxTree {
    nodes: Vec<SyntaxNode>,
    root: NodeId,
    blank_lines: BTreeSet<u32>,
    line_count: u32,
}

impl SyntaxTree {
    pub(crate) fn from_parts(nodes: Vec<SyntaxNode>, blank_lines: BTreeSet<u32>, line_count: u32) -> Self {
        SyntaxTree { nodes, root: 0, blank_lines, line_count }
    }

    pub fn from_fragment(fragment: &Fragment) -> Self {
        let mut nodes = Vec::new();
        push_fragment(&mut nodes, fragment, None, Span::default());
        SyntaxTree { nodes, root: 0, blank_lines: BTreeSet::new(), line_count: 0 }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &SyntaxNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &SyntaxNode)> {
        self.nodes.iter().enumerate()
    }

    pub fn line_count(&self) -> u32 {
        self.line_count
    }

    pub fn is_blank_line(&self, line: u32) -> bool {
        self.blank_lines.contains(&line)
    }

    /// Relation label under which `id` hangs from its parent.
    pub fn relation_of(&self, id: NodeId) -> Option<&str> {
        let parent = self.nodes[id].parent?;
        self.nodes[parent].children.iter().find(|c| c.id == id).map(|c| c.relation.as_str())
    }

    /// Position of `id` among the siblings sharing its relation.
    pub fn index_in_relation(&self, id: NodeId) -> Option<usize> {
        let parent = self.nodes[id].parent?;
        let relation = self.relation_of(id)?;
        self.nodes[parent].children_in(relation).position(|c| c == id)
    }

    pub fn ancestors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(self.nodes[id].parent, move |&p| self.nodes[p].parent)
    }

    pub fn is_ancestor(&self, ancestor: NodeId, id: NodeId) -> bool {
        self.ancestors(id).any(|a| a == ancestor)
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.ancestors(id).count()
    }

    /// Preorder walk of the subtree rooted at `id`.
    pub fn descendants(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            out.push(n);
            for c in self.nodes[n].children.iter().rev() {
                stack.push(c.id);
            }
        }
        out
    }

    /// Statements lying in the same statement list as `id`, in source order,
    /// together with the position of `id` in that list.
    pub fn statement_siblings(&self, id: NodeId) -> Option<(Vec<NodeId>, usize)> {
        let parent = self.nodes[id].parent?;
        let relation = self.relation_of(id)?;
        let siblings: Vec<NodeId> = self.nodes[parent].children_in(relation).collect();
        let pos = siblings.iter().position(|&s| s == id)?;
        Some((siblings, pos))
    }

    /// Deepest statement nodes whose spans cover the given lines.
    ///
    /// Blank and comment-only lines are ignored. For each remaining line the
    /// deepest covering statement is taken; statements that have an ancestor
    /// in the resulting set are dropped, so no returned node is an ancestor of
    /// another. The result is ordered by source position.
    pub fn deepest_statements(&self, lines: &[SourceSpan]) -> Result<Vec<NodeId>, EmptyResult> {
        let mut chosen = BTreeSet::new();
        for span in lines {
            for line in span.iter() {
                if line == 0 || line > self.line_count || self.is_blank_line(line) {
                    continue;
                }
                if let Some(stmt) = self.deepest_statement_at(line) {
                    chosen.insert(stmt);
                }
            }
        }
        let reduced: Vec<NodeId> = chosen
            .iter()
            .copied()
            .filter(|&n| !self.ancestors(n).any(|a| chosen.contains(&a)))
            .collect();
        if reduced.is_empty() {
            return Err(EmptyResult);
        }
        Ok(reduced)
    }

    fn deepest_statement_at(&self, line: u32) -> Option<NodeId> {
        let mut best: Option<(usize, NodeId)> = None;
        for (id, node) in self.nodes.iter().enumerate() {
            if node.is_statement() && node.span.covers_line(line) {
                let depth = self.depth(id);
                if best.is_none_or(|(d, _)| depth > d) {
                    best = Some((depth, id));
                }
            }
        }
        best.map(|(_, id)| id)
    }

    /// Structural equality: kinds, values and labelled child lists agree.
    /// Spans are ignored.
    pub fn structurally_eq(&self, other: &SyntaxTree) -> bool {
        self.subtree_eq(self.root, other, other.root)
    }

    pub fn subtree_eq(&self, a: NodeId, other: &SyntaxTree, b: NodeId) -> bool {
        let (x, y) = (&self.nodes[a], &other.nodes[b]);
        x.kind == y.kind
            && x.value == y.value
            && x.children.len() == y.children.len()
            && x
                .children
                .iter()
                .zip(&y.children)
                .all(|(c, d)| c.relation == d.relation && self.subtree_eq(c.id, other, d.id))
    }

    pub fn to_fragment(&self, id: NodeId) -> Fragment {
        let node = &self.nodes[id];
        Fragment {
            kind: node.kind.clone(),
            value: node.value.clone(),
            children: node
                .children
                .iter()
                .map(|c| (c.relation.clone(), self.to_fragment(c.id)))
                .collect(),
        }
    }

    /// Rebuilds the tree with the given edits applied. Edits must target
    /// distinct, non-nested regions. Inserted nodes inherit the span of the
    /// parent they are attached to.
    pub fn splice(&self, edits: &[Splice]) -> SyntaxTree {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        self.copy_with_edits(self.root, None, edits, &mut nodes);
        SyntaxTree {
            nodes,
            root: 0,
            blank_lines: self.blank_lines.clone(),
            line_count: self.line_count,
        }
    }

    fn copy_with_edits(
        &self,
        id: NodeId,
        parent: Option<NodeId>,
        edits: &[Splice],
        out: &mut Vec<SyntaxNode>,
    ) -> NodeId {
        let node = &self.nodes[id];
        let new_id = out.len();
        out.push(SyntaxNode {
            kind: node.kind.clone(),
            value: node.value.clone(),
            children: Vec::new(),
            parent,
            span: node.span,
        });
        let mut children = Vec::new();
        let mut relations: Vec<&str> = Vec::new();
        for c in &node.children {
            if !relations.contains(&c.relation.as_str()) {
                relations.push(&c.relation);
            }
        }
        for e in edits.iter().filter(|e| e.parent == id) {
            if !relations.contains(&e.relation.as_str()) {
                relations.push(&e.relation);
            }
        }
        // Children are emitted relation by relation in first-appearance order,
        // except that interleaved relations (Compare, Dict) keep their order
        // when no edit touches them.
        let touched = edits.iter().any(|e| e.parent == id);
        if !touched {
            for c in &node.children {
                let cid = self.copy_with_edits(c.id, Some(new_id), edits, out);
                children.push(Child { relation: c.relation.clone(), id: cid });
            }
        } else {
            for relation in relations {
                let existing: Vec<NodeId> = node.children_in(relation).collect();
                let mut rel_edits: Vec<&Splice> =
                    edits.iter().filter(|e| e.parent == id && e.relation == relation).collect();
                rel_edits.sort_by_key(|e| e.start);
                let mut pos = 0;
                for e in rel_edits {
                    while pos < e.start.min(existing.len()) {
                        let cid = self.copy_with_edits(existing[pos], Some(new_id), edits, out);
                        children.push(Child { relation: relation.to_string(), id: cid });
                        pos += 1;
                    }
                    for frag in &e.replacement {
                        let cid = push_fragment(out, frag, Some(new_id), node.span);
                        children.push(Child { relation: relation.to_string(), id: cid });
                    }
                    pos = pos.max(e.end.min(existing.len()));
                }
                while pos < existing.len() {
                    let cid = self.copy_with_edits(existing[pos], Some(new_id), edits, out);
                    children.push(Child { relation: relation.to_string(), id: cid });
                    pos += 1;
                }
            }
        }
        out[new_id].children = children;
        new_id
    }
}

fn push_fragment(out: &mut Vec<SyntaxNode>, frag: &Fragment, parent: Option<NodeId>, span: Span) -> NodeId {
    let id = out.len();
    out.push(SyntaxNode {
        kind: frag.kind.clone(),
        value: frag.value.clone(),
        children: Vec::new(),
        parent,
        span,
    });
    let mut children = Vec::with_capacity(frag.children.len());
    for (relation, child) in &frag.children {
        let cid = push_fragment(out, child, Some(id), span);
        children.push(Child { relation: relation.clone(), id: cid });
    }
    out[id].children = children;
    id
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("the given lines contain no statements")]
pub struct EmptyResult;

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(tree: &SyntaxTree, ids: &[NodeId]) -> Vec<String> {
        ids.iter().map(|&i| tree.node(i).kind.clone()).collect()
    }

    #[test]
    fn minimal_assignment() {
        let tree = parse_source("x = 1").unwrap();
        let module = tree.node(tree.root());
        assert_eq!(module.kind, "Module");
        assert_eq!(module.children.len(), 1);
        let assign = tree.node(module.children[0].id);
        assert_eq!(assign.kind, "Assign");
        let targets: Vec<_> = assign.children_in("targets").collect();
        assert_eq!(targets.len(), 1);
        assert_eq!(tree.node(targets[0]).value.text(), Some("x"));
        let value = tree.node(assign.child("value").unwrap());
        assert_eq!(value.kind, "Constant");
        assert_eq!(value.value.text(), Some("1"));
    }

    #[test]
    fn if_condition_is_nested_call_chain() {
        let src = "if isinstance(to_native(value), string_types):\n    pass\n";
        let tree = parse_source(src).unwrap();
        let stmt = tree.node(tree.root()).children[0].id;
        assert_eq!(tree.node(stmt).kind, "If");
        let test = tree.node(tree.node(stmt).child("test").unwrap());
        assert_eq!(test.kind, "Call");
        let func = tree.node(test.child("func").unwrap());
        assert_eq!(func.value.text(), Some("isinstance"));
        let inner = tree.node(test.children_in("args").next().unwrap());
        assert_eq!(inner.kind, "Call");
        assert_eq!(tree.node(inner.child("func").unwrap()).value.text(), Some("to_native"));
    }

    #[test]
    fn unbalanced_paren_is_a_syntax_error() {
        assert!(parse_source("x = (").is_err());
    }

    #[test]
    fn child_spans_are_contained() {
        let src = "@dec\ndef f(a, b=2):\n    if a:\n        return b\n    return [i for i in a]\n";
        let tree = parse_source(src).unwrap();
        for (id, node) in tree.nodes() {
            for c in &node.children {
                assert!(node.span.contains(&tree.node(c.id).span), "{} !⊇ child of {id}", node.kind);
            }
        }
    }

    #[test]
    fn deepest_statement_on_if_line() {
        let src = "def f(value):\n    if value:\n        return 1\n    return 2\n";
        let tree = parse_source(src).unwrap();
        let got = tree.deepest_statements(&[SourceSpan::line(2)]).unwrap();
        assert_eq!(kinds(&tree, &got), vec!["If"]);
    }

    #[test]
    fn deepest_statement_prefers_innermost_return() {
        let src = "def outer():\n    def inner(x):\n        return x + 1\n    return inner\n";
        let tree = parse_source(src).unwrap();
        let got = tree.deepest_statements(&[SourceSpan::line(3)]).unwrap();
        assert_eq!(kinds(&tree, &got), vec!["Return"]);
        // Oracle: every statement covering line 3 is an ancestor of the answer.
        for (id, node) in tree.nodes() {
            if node.is_statement() && node.span.covers_line(3) && id != got[0] {
                assert!(tree.is_ancestor(id, got[0]));
            }
        }
    }

    #[test]
    fn two_sibling_statements() {
        let tree = parse_source("a = 1\nb = 2\nc = 3\n").unwrap();
        let got = tree.deepest_statements(&[SourceSpan::new(1, 2)]).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got[0] < got[1]);
    }

    #[test]
    fn blank_and_comment_lines_give_empty_result() {
        let tree = parse_source("a = 1\n\n# note\nb = 2\n").unwrap();
        assert_eq!(tree.deepest_statements(&[SourceSpan::new(2, 3)]), Err(EmptyResult));
    }

    #[test]
    fn splice_replaces_a_child() {
        let tree = parse_source("x = f(a)\n").unwrap();
        let assign = tree.node(tree.root()).children[0].id;
        let wrapped = Fragment::new("Call", NodeValue::None)
            .with_child("func", Fragment::new("Name", NodeValue::Text("str".into())))
            .with_child("args", tree.to_fragment(tree.node(assign).child("value").unwrap()));
        let edited = tree.splice(&[Splice {
            parent: assign,
            relation: "value".into(),
            start: 0,
            end: 1,
            replacement: vec![wrapped],
        }]);
        assert_eq!(unparse(&edited).unwrap(), "x = str(f(a))\n");
    }
}
