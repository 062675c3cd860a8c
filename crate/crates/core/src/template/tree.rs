use std::fmt;

use sha2::{Digest, Sha256};

use super::base_type::{BaseType, BaseTypeTable};
use crate::syntax::{NodeId, NodeValue, SyntaxTree, HOLE_KIND};

/// Kind of the synthetic node that groups several sibling statements or
/// edit sites under one root.
pub const GROUP_KIND: &str = "Group";
/// Relation label of the children of a group node.
pub const GROUP_RELATION: &str = "stmts";

/// An attribute that is either concrete or a hole.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot<T> {
    Abs,
    Val(T),
}

impl<T> Slot<T> {
    pub fn is_abs(&self) -> bool {
        matches!(self, Slot::Abs)
    }

    pub fn as_val(&self) -> Option<&T> {
        match self {
            Slot::Val(v) => Some(v),
            Slot::Abs => None,
        }
    }
}

/// Node of a template tree. The id is the node's preorder index in its tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TemplateNode {
    pub bt: Slot<BaseType>,
    pub t: Slot<String>,
    pub v: Slot<Option<String>>,
}

impl TemplateNode {
    pub fn new(bt: BaseType, t: impl Into<String>, v: Option<String>) -> Self {
        TemplateNode { bt: Slot::Val(bt), t: Slot::Val(t.into()), v: Slot::Val(v) }
    }

    pub fn group() -> Self {
        TemplateNode::new(BaseType::Stmt, GROUP_KIND, None)
    }

    /// Node whose kind and value are both holes.
    pub fn type_hole(bt: BaseType) -> Self {
        TemplateNode { bt: Slot::Val(bt), t: Slot::Abs, v: Slot::Abs }
    }

    pub fn kind(&self) -> Option<&str> {
        self.t.as_val().map(String::as_str)
    }

    /// Concrete value text, if the node has one.
    pub fn value(&self) -> Option<&str> {
        match &self.v {
            Slot::Val(Some(v)) => Some(v),
            _ => None,
        }
    }

    pub fn base_type(&self) -> Option<BaseType> {
        self.bt.as_val().copied()
    }

    pub fn is_group(&self) -> bool {
        self.kind() == Some(GROUP_KIND)
    }

    pub fn has_hole(&self) -> bool {
        self.t.is_abs() || self.v.is_abs()
    }
}

impl fmt::Display for TemplateNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bt = self.bt.as_val().map_or("ABS", |b| b.as_str());
        let t = self.t.as_val().map_or("ABS", String::as_str);
        match &self.v {
            Slot::Abs => write!(f, "{bt}:{t}=ABS"),
            Slot::Val(Some(v)) => write!(f, "{bt}:{t}={v}"),
            Slot::Val(None) => write!(f, "{bt}:{t}"),
        }
    }
}

/// Owned recursive form used to build and transform trees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subtree {
    pub node: TemplateNode,
    pub children: Vec<(String, Subtree)>,
}

impl Subtree {
    pub fn leaf(node: TemplateNode) -> Self {
        Subtree { node, children: Vec::new() }
    }

    pub fn with(mut self, relation: impl Into<String>, child: Subtree) -> Self {
        self.children.push((relation.into(), child));
        self
    }

    pub fn clone_without_children(&self) -> Subtree {
        Subtree::leaf(self.node.clone())
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|(_, c)| c.size()).sum::<usize>()
    }

    /// Groups several subtrees under a synthetic root; a single subtree is
    /// returned unchanged and an empty list yields `None`.
    pub fn group(mut items: Vec<Subtree>) -> Option<Subtree> {
        match items.len() {
            0 => None,
            1 => items.pop(),
            _ => Some(Subtree {
                node: TemplateNode::group(),
                children: items.into_iter().map(|s| (GROUP_RELATION.to_string(), s)).collect(),
            }),
        }
    }

    /// Like [`Subtree::group`] but always wraps in a group node.
    pub fn group_always(items: Vec<Subtree>) -> Option<Subtree> {
        if items.is_empty() {
            return None;
        }
        Some(Subtree {
            node: TemplateNode::group(),
            children: items.into_iter().map(|s| (GROUP_RELATION.to_string(), s)).collect(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeHash(pub [u8; 32]);

impl TreeHash {
    pub fn short(&self) -> String {
        self.0[..6].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for TreeHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Entry {
    node: TemplateNode,
    parent: Option<usize>,
    relation: String,
    children: Vec<usize>,
}

/// Template tree stored in preorder; node ids are preorder indices, so ids
/// strictly increase along any preorder walk. The empty tree has no nodes.
#[derive(Clone, Debug)]
pub struct TemplateTree {
    entries: Vec<Entry>,
    hash: TreeHash,
}

impl PartialEq for TemplateTree {
    fn eq(&self, other: &Self) -> bool {
        self.hash == other.hash && self.entries == other.entries
    }
}

impl Eq for TemplateTree {}

impl std::hash::Hash for TemplateTree {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.hash.hash(state);
    }
}

impl Default for TemplateTree {
    fn default() -> Self {
        TemplateTree::empty()
    }
}

impl TemplateTree {
    pub fn empty() -> Self {
        TemplateTree::from_subtree(None)
    }

    pub fn from_subtree(root: Option<Subtree>) -> Self {
        let mut entries = Vec::new();
        if let Some(root) = root {
            flatten(&root, None, String::new(), &mut entries);
        }
        let hash = compute_hash(&entries);
        TemplateTree { entries, hash }
    }

    pub fn single(root: Subtree) -> Self {
        TemplateTree::from_subtree(Some(root))
    }

    /// Converts the syntax subtree rooted at `id`; also returns, for every
    /// template node, the syntax node it came from.
    pub fn from_syntax(tree: &SyntaxTree, id: NodeId, table: &BaseTypeTable) -> (TemplateTree, Vec<NodeId>) {
        let sub = syntax_subtree(tree, id, table);
        let origin = tree.descendants(id);
        (TemplateTree::single(sub), origin)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn root(&self) -> Option<usize> {
        if self.entries.is_empty() {
            None
        } else {
            Some(0)
        }
    }

    pub fn root_node(&self) -> Option<&TemplateNode> {
        self.entries.first().map(|e| &e.node)
    }

    pub fn node(&self, i: usize) -> &TemplateNode {
        &self.entries[i].node
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.entries[i].children
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.entries[i].parent
    }

    /// Relation of the edge from `i`'s parent; empty for the root.
    pub fn relation(&self, i: usize) -> &str {
        &self.entries[i].relation
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, &TemplateNode)> {
        self.entries.iter().enumerate().map(|(i, e)| (i, &e.node))
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.entries[i].children.is_empty()).collect()
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.entries[i].children.is_empty()
    }

    pub fn hash(&self) -> TreeHash {
        self.hash
    }

    /// Index one past the last node of the subtree rooted at `i`.
    pub fn subtree_end(&self, i: usize) -> usize {
        let mut end = i + 1;
        while end < self.len() && self.is_within(end, i) {
            end += 1;
        }
        end
    }

    /// True when `a` is a proper ancestor of `n`.
    pub fn is_ancestor_of(&self, a: usize, n: usize) -> bool {
        a != n && self.is_within(n, a)
    }

    fn is_within(&self, mut n: usize, ancestor: usize) -> bool {
        loop {
            if n == ancestor {
                return true;
            }
            match self.entries[n].parent {
                Some(p) => n = p,
                None => return false,
            }
        }
    }

    pub fn subtree(&self, i: usize) -> Subtree {
        Subtree {
            node: self.entries[i].node.clone(),
            children: self.entries[i]
                .children
                .iter()
                .map(|&c| (self.entries[c].relation.clone(), self.subtree(c)))
                .collect(),
        }
    }

    pub fn to_subtree(&self) -> Option<Subtree> {
        self.root().map(|r| self.subtree(r))
    }

    /// Structural equality of the subtrees at `a` in `self` and `b` in `other`.
    pub fn subtree_eq(&self, a: usize, other: &TemplateTree, b: usize) -> bool {
        let (x, y) = (&self.entries[a], &other.entries[b]);
        x.node == y.node
            && x.children.len() == y.children.len()
            && x.children.iter().zip(&y.children).all(|(&c, &d)| {
                self.entries[c].relation == other.entries[d].relation && self.subtree_eq(c, other, d)
            })
    }

    /// Number of nodes whose kind or value is a hole.
    pub fn hole_count(&self) -> usize {
        self.entries.iter().filter(|e| e.node.has_hole()).count()
    }

    /// Concreteness measure used for termination bounds: every concrete
    /// attribute of every node counts one.
    pub fn concrete_weight(&self) -> usize {
        self.entries
            .iter()
            .map(|e| usize::from(!e.node.bt.is_abs()) + usize::from(!e.node.t.is_abs()) + usize::from(!e.node.v.is_abs()))
            .sum()
    }

    /// Values of all nodes of the given base type.
    pub fn values_of(&self, bt: BaseType) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.node.base_type() == Some(bt))
            .filter_map(|e| e.node.value())
            .collect()
    }

    /// Exact-value embedding: some node of `self` equals `pattern`'s root and
    /// `pattern`'s children map, relation by relation and in order, onto a
    /// subsequence of that node's children, recursively.
    pub fn embeds_exact(&self, pattern: &TemplateTree) -> bool {
        let Some(proot) = pattern.root() else { return true };
        (0..self.len()).any(|a| self.embeds_exact_at(a, pattern, proot))
    }

    fn embeds_exact_at(&self, a: usize, pattern: &TemplateTree, b: usize) -> bool {
        if self.entries[a].node != pattern.entries[b].node {
            return false;
        }
        let mut pos = 0;
        let ac = &self.entries[a].children;
        'outer: for &bc in &pattern.entries[b].children {
            while pos < ac.len() {
                let cand = ac[pos];
                pos += 1;
                if self.entries[cand].relation == pattern.entries[bc].relation && self.embeds_exact_at(cand, pattern, bc) {
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// Indented one-node-per-line rendering for diagnostics.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            let depth = std::iter::successors(e.parent, |&p| self.entries[p].parent).count();
            let rel = if e.relation.is_empty() { String::new() } else { format!("{}: ", e.relation) };
            out.push_str(&format!("{}{rel}{} #{i}\n", "  ".repeat(depth), e.node));
        }
        out
    }
}

fn flatten(node: &Subtree, parent: Option<usize>, relation: String, out: &mut Vec<Entry>) -> usize {
    let id = out.len();
    out.push(Entry { node: node.node.clone(), parent, relation, children: Vec::new() });
    let mut children = Vec::with_capacity(node.children.len());
    for (rel, child) in &node.children {
        children.push(flatten(child, Some(id), rel.clone(), out));
    }
    out[id].children = children;
    id
}

fn compute_hash(entries: &[Entry]) -> TreeHash {
    let mut h = Sha256::new();
    fn field(h: &mut Sha256, tag: u8, s: Option<&str>) {
        match s {
            Some(s) => {
                h.update([tag]);
                h.update((s.len() as u64).to_le_bytes());
                h.update(s.as_bytes());
            }
            None => h.update([tag | 0x80]),
        }
    }
    h.update((entries.len() as u64).to_le_bytes());
    for e in entries {
        field(&mut h, 1, Some(&e.relation));
        field(&mut h, 2, e.node.bt.as_val().map(|b| b.as_str()));
        field(&mut h, 3, e.node.t.as_val().map(String::as_str));
        match &e.node.v {
            Slot::Abs => h.update([4 | 0x80]),
            Slot::Val(None) => h.update([5]),
            Slot::Val(Some(v)) => field(&mut h, 6, Some(v)),
        }
        h.update((e.children.len() as u64).to_le_bytes());
    }
    TreeHash(h.finalize().into())
}

fn syntax_subtree(tree: &SyntaxTree, id: NodeId, table: &BaseTypeTable) -> Subtree {
    let node = tree.node(id);
    let relation = tree.relation_of(id);
    let tnode = if node.kind == HOLE_KIND {
        let bt = if relation.is_some_and(|r| crate::syntax::STATEMENT_RELATIONS.contains(&r)) {
            BaseType::Stmt
        } else {
            BaseType::Expr
        };
        TemplateNode::type_hole(bt)
    } else {
        let v = match &node.value {
            NodeValue::None => Slot::Val(None),
            NodeValue::Text(s) => Slot::Val(Some(s.clone())),
            NodeValue::Hole => Slot::Abs,
        };
        let bt = table.classify(&node.kind, relation, node.value.text());
        TemplateNode { bt: Slot::Val(bt), t: Slot::Val(node.kind.clone()), v }
    };
    Subtree {
        node: tnode,
        children: node
            .children
            .iter()
            .map(|c| (c.relation.clone(), syntax_subtree(tree, c.id, table)))
            .collect(),
    }
}
