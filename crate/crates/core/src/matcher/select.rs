//! Finding the deepest matching templates and ordering them.

use std::collections::{BTreeMap, VecDeque};

use crate::metrics::abstraction_ratio;
use crate::template::{ClusteringTree, FixTemplate, TreeHash};

use super::view::{template_matches_view, BuggyProgramView};

/// Walks every tree breadth-first from its root and returns the matched
/// templates none of whose children match. A tree whose root does not match
/// contributes nothing.
pub fn bfs_select(forest: &[ClusteringTree], view: &BuggyProgramView) -> Vec<FixTemplate> {
    let mut out = Vec::new();
    for tree in forest {
        if !template_matches_view(view, tree.root()) {
            continue;
        }
        let mut queue = VecDeque::from([tree.root_index()]);
        while let Some(n) = queue.pop_front() {
            let matched: Vec<usize> =
                tree.children(n).iter().copied().filter(|&c| template_matches_view(view, tree.template(c))).collect();
            if matched.is_empty() {
                out.push(tree.template(n).clone());
            }
            queue.extend(matched);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("no template matches the program")]
pub struct EmptyMatch;

/// Templates sharing one buggy side, most frequent first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedGroup {
    pub key: TreeHash,
    pub templates: Vec<FixTemplate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedTemplates {
    pub groups: Vec<RankedGroup>,
}

impl RankedTemplates {
    pub fn iter(&self) -> impl Iterator<Item = &FixTemplate> {
        self.groups.iter().flat_map(|g| g.templates.iter())
    }
}

/// Groups templates by their buggy side. Inside a group templates are
/// ordered by descending instance count; groups by ascending abstraction
/// ratio of their first template's fixed tree. Remaining ties go by hash.
pub fn rank(matched: Vec<FixTemplate>) -> Result<RankedTemplates, EmptyMatch> {
    if matched.is_empty() {
        return Err(EmptyMatch);
    }
    let mut by_key: BTreeMap<TreeHash, Vec<FixTemplate>> = BTreeMap::new();
    for t in matched {
        by_key.entry(t.buggy_side().hash()).or_default().push(t);
    }
    let mut groups: Vec<RankedGroup> = by_key
        .into_iter()
        .map(|(key, mut templates)| {
            templates.sort_by(|a, b| {
                b.instance_count
                    .cmp(&a.instance_count)
                    .then(a.content_hash().cmp(&b.content_hash()))
                    .then(a.id.cmp(&b.id))
            });
            RankedGroup { key, templates }
        })
        .collect();
    groups.sort_by(|a, b| {
        let ra = abstraction_ratio(&a.templates[0].pattern.after);
        let rb = abstraction_ratio(&b.templates[0].pattern.after);
        ra.total_cmp(&rb).then(a.key.cmp(&b.key))
    });
    Ok(RankedTemplates { groups })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::fix_parser::{parse_fix, FixInstance};
    use crate::template::{BaseType, ExternalContext, FixPattern, InternalContext, Slot, Subtree, TemplateNode, TemplateTree};

    fn tpl(id: &str, buggy: &str, fixed: &str) -> FixTemplate {
        parse_fix(&FixInstance::from_sources(id, buggy, fixed)).unwrap()
    }

    fn with_count(mut t: FixTemplate, n: usize) -> FixTemplate {
        t.instance_ids = (0..n).map(|k| format!("{}{k}", t.id)).collect::<BTreeSet<_>>();
        t.instance_count = n;
        t
    }

    fn general(id: &str) -> FixTemplate {
        let a = TemplateTree::single(Subtree::leaf(TemplateNode::type_hole(BaseType::Stmt)));
        FixTemplate::new(id, FixPattern::new(TemplateTree::empty(), a), InternalContext::empty(), ExternalContext::empty(), BTreeSet::new())
            .unwrap()
    }

    fn view() -> BuggyProgramView {
        BuggyProgramView::from_fix(&FixInstance::from_sources("v", "x = f(y)\n", "x = g(f(y))\n")).unwrap()
    }

    #[test]
    fn frontier_selection() {
        let leaf_ok = tpl("ok", "x = f(y)\n", "x = g(f(y))\n");
        let leaf_no = tpl("no", "x = h(y)\n", "x = g(h(y))\n");
        let root_only = ClusteringTree::leaf(general("r"));
        assert_eq!(bfs_select(&[root_only], &view())[0].id, "r");

        let chain = ClusteringTree::join(general("r"), vec![ClusteringTree::join(general("a"), vec![ClusteringTree::leaf(leaf_no.clone())])]);
        assert_eq!(bfs_select(&[chain], &view()).iter().map(|t| t.id.as_str()).collect::<Vec<_>>(), ["a"]);

        let mut twin = leaf_ok.clone();
        twin.id = "ok2".into();
        let branching = ClusteringTree::join(general("r"), vec![ClusteringTree::leaf(leaf_ok), ClusteringTree::leaf(leaf_no.clone()), ClusteringTree::leaf(twin)]);
        assert_eq!(bfs_select(&[branching], &view()).iter().map(|t| t.id.as_str()).collect::<Vec<_>>(), ["ok", "ok2"]);

        assert!(bfs_select(&[ClusteringTree::leaf(leaf_no)], &view()).is_empty());
    }

    #[test]
    fn ranking_orders_groups_and_members() {
        let a40 = with_count(tpl("a40", "x = f(y)\n", "x = g(f(y))\n"), 40);
        let a7 = with_count(tpl("a7", "x = f(y)\n", "x = h(f(y))\n"), 7);
        let ranked = rank(vec![a7.clone(), a40.clone()]).unwrap();
        assert_eq!(ranked.groups.len(), 1);
        assert_eq!(ranked.iter().map(|t| t.instance_count).collect::<Vec<_>>(), [40, 7]);

        let mut holey = tpl("h", "x = q(y)\n", "x = g(q(y))\n");
        let mut sub = holey.pattern.after.to_subtree().unwrap();
        sub.node.v = Slot::Abs;
        sub.children[0].1.node.v = Slot::Abs;
        holey.pattern.after = TemplateTree::single(sub);
        let ranked = rank(vec![holey.clone(), a40.clone()]).unwrap();
        assert_eq!(ranked.groups[0].templates[0].id, "a40");
        assert_eq!(rank(vec![a40.clone(), holey]).unwrap(), ranked);
        assert_eq!(rank(Vec::new()), Err(EmptyMatch));
    }
}
