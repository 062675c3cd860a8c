use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::tree::{Subtree, TemplateTree, TreeHash, GROUP_RELATION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Add,
    Remove,
    Insert,
    Replace,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::Add, Category::Remove, Category::Insert, Category::Replace];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Add => "Add",
            Category::Remove => "Remove",
            Category::Insert => "Insert",
            Category::Replace => "Replace",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown category `{0}`")]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("fix pattern has empty before and after trees")]
pub struct InvalidPattern;

/// Before/after trees of an edit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FixPattern {
    pub before: TemplateTree,
    pub after: TemplateTree,
}

impl FixPattern {
    pub fn new(before: TemplateTree, after: TemplateTree) -> Self {
        FixPattern { before, after }
    }

    pub fn is_empty(&self) -> bool {
        self.before.is_empty() && self.after.is_empty()
    }
}

/// Classifies a pattern into one of the four edit categories.
pub fn category_of(p: &FixPattern) -> Result<Category, InvalidPattern> {
    match (p.before.is_empty(), p.after.is_empty()) {
        (true, true) => Err(InvalidPattern),
        (true, false) => Ok(Category::Add),
        (false, true) => Ok(Category::Remove),
        (false, false) if p.after.embeds_exact(&p.before) && p.after != p.before => Ok(Category::Insert),
        (false, false) => Ok(Category::Replace),
    }
}

/// Attachment of the before/after trees below an internal-context node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Attachment {
    pub br: String,
    pub ar: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct InternalContext {
    pub tree: TemplateTree,
    pub rn: BTreeMap<usize, Attachment>,
}

impl InternalContext {
    pub fn empty() -> Self {
        InternalContext::default()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    /// The attachment node and its relations, if any.
    pub fn attachment(&self) -> Option<(usize, &Attachment)> {
        self.rn.iter().next().map(|(&n, a)| (n, a))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExternalContext {
    pub before: TemplateTree,
    pub after: TemplateTree,
}

impl ExternalContext {
    pub fn empty() -> Self {
        ExternalContext::default()
    }

    pub fn is_empty(&self) -> bool {
        self.before.is_empty() && self.after.is_empty()
    }
}

/// Attaches `b` to the internal-context tree at the node recorded in `rn`,
/// under relation `br`. Group roots of `b` are spliced so that their members
/// become direct children of the attachment node. With an empty context the
/// result is `b` itself.
pub fn concat(ic: &TemplateTree, b: &TemplateTree, rn: &BTreeMap<usize, Attachment>) -> TemplateTree {
    let Some(mut root) = ic.to_subtree() else { return b.clone() };
    let Some(b_sub) = b.to_subtree() else { return ic.clone() };
    let Some((&node, att)) = rn.iter().next() else { return ic.clone() };
    let mut counter = 0;
    attach(&mut root, node, &mut counter, &att.br, &b_sub);
    TemplateTree::single(root)
}

fn attach(cur: &mut Subtree, target: usize, counter: &mut usize, relation: &str, b: &Subtree) -> bool {
    if *counter == target {
        if b.node.is_group() {
            for (rel, child) in &b.children {
                debug_assert_eq!(rel, GROUP_RELATION);
                cur.children.push((relation.to_string(), child.clone()));
            }
        } else {
            cur.children.push((relation.to_string(), b.clone()));
        }
        return true;
    }
    for (_, child) in cur.children.iter_mut() {
        *counter += 1;
        if attach(child, target, counter, relation, b) {
            return true;
        }
        *counter += child.size() - 1;
    }
    false
}

/// A fix template: pattern, internal context and external context, plus the
/// corpus instances it represents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixTemplate {
    pub id: String,
    pub category: Category,
    pub pattern: FixPattern,
    pub ic: InternalContext,
    pub ec: ExternalContext,
    pub instance_count: usize,
    pub instance_ids: BTreeSet<String>,
}

impl FixTemplate {
    pub fn new(
        id: impl Into<String>,
        pattern: FixPattern,
        ic: InternalContext,
        ec: ExternalContext,
        instance_ids: BTreeSet<String>,
    ) -> Result<Self, InvalidPattern> {
        let category = category_of(&pattern)?;
        Ok(FixTemplate {
            id: id.into(),
            category,
            pattern,
            ic,
            ec,
            instance_count: instance_ids.len(),
            instance_ids,
        })
    }

    /// Tree the buggy program's Bug_Tree must match.
    pub fn buggy_side(&self) -> TemplateTree {
        concat(&self.ic.tree, &self.pattern.before, &self.ic.rn)
    }

    /// Hash over every component except bookkeeping fields.
    pub fn content_hash(&self) -> TreeHash {
        let mut h = Sha256::new();
        for t in [&self.pattern.before, &self.pattern.after, &self.ic.tree, &self.ec.before, &self.ec.after] {
            h.update(t.hash().0);
        }
        for (n, a) in &self.ic.rn {
            h.update((*n as u64).to_le_bytes());
            h.update(a.br.as_bytes());
            h.update([0]);
            h.update(a.ar.as_bytes());
            h.update([0]);
        }
        TreeHash(h.finalize().into())
    }

    /// Equality of (P, IC, EC), ignoring ids and instance bookkeeping.
    pub fn same_content(&self, other: &FixTemplate) -> bool {
        self.pattern == other.pattern && self.ic == other.ic && self.ec == other.ec
    }

    /// True when no node of any component holds a hole.
    pub fn is_specific(&self) -> bool {
        [&self.pattern.before, &self.pattern.after, &self.ic.tree, &self.ec.before, &self.ec.after]
            .iter()
            .all(|t| t.hole_count() == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tree::tests::{expr_tree, stmt_tree};
    use super::*;

    #[test]
    fn categories() {
        let add = FixPattern::new(TemplateTree::empty(), stmt_tree("if x:\n    pass\n"));
        assert_eq!(category_of(&add), Ok(Category::Add));
        let remove = FixPattern::new(stmt_tree("x = 1\n"), TemplateTree::empty());
        assert_eq!(category_of(&remove), Ok(Category::Remove));
        let insert = FixPattern::new(expr_tree("y = f(x)\n"), expr_tree("y = g(f(x))\n"));
        assert_eq!(category_of(&insert), Ok(Category::Insert));
        let replace = FixPattern::new(expr_tree("y = unquote(user)\n"), expr_tree("y = ascii(user)\n"));
        assert_eq!(category_of(&replace), Ok(Category::Replace));
        assert_eq!(category_of(&FixPattern::default()), Err(InvalidPattern));
    }

    #[test]
    fn concat_attaches_under_relation() {
        let ic = TemplateTree::single(stmt_tree("if a:\n    pass\n").subtree(0).clone_without_children());
        let b = expr_tree("x = isinstance(value, str)\n");
        let mut rn = BTreeMap::new();
        rn.insert(0, Attachment { br: "test".into(), ar: "test".into() });
        let joined = concat(&ic, &b, &rn);
        assert_eq!(joined.len(), 1 + b.len());
        assert_eq!(joined.relation(1), "test");
        assert_eq!(joined.node(1).kind(), Some("Call"));
    }

    #[test]
    fn concat_splices_groups() {
        let ic = TemplateTree::single(stmt_tree("if a:\n    pass\n").subtree(0).clone_without_children());
        let group = Subtree::group(vec![stmt_tree("x = 1\n").subtree(0), stmt_tree("y = 2\n").subtree(0)]).unwrap();
        let mut rn = BTreeMap::new();
        rn.insert(0, Attachment { br: "body".into(), ar: "body".into() });
        let joined = concat(&ic, &TemplateTree::single(group), &rn);
        assert_eq!(joined.children(0).len(), 2);
        assert!(joined.children(0).iter().all(|&c| joined.relation(c) == "body"));
    }

    #[test]
    fn empty_context_concat_is_pattern() {
        let b = stmt_tree("x = 1\n");
        assert_eq!(concat(&TemplateTree::empty(), &b, &BTreeMap::new()), b);
    }
}
