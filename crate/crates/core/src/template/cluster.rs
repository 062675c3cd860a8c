use super::fix_template::FixTemplate;

/// Hierarchy of templates: every parent was abstracted directly from its
/// children. Leaves are specific templates, the root is the most general.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusteringTree {
    nodes: Vec<ClusterNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterNode {
    pub template: FixTemplate,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl ClusteringTree {
    pub fn leaf(template: FixTemplate) -> Self {
        ClusteringTree { nodes: vec![ClusterNode { template, parent: None, children: Vec::new() }] }
    }

    /// Builds a tree whose root is `template` with the given subtrees below it.
    pub fn join(template: FixTemplate, subtrees: Vec<ClusteringTree>) -> Self {
        let mut nodes = vec![ClusterNode { template, parent: None, children: Vec::new() }];
        for sub in subtrees {
            let offset = nodes.len();
            nodes[0].children.push(offset);
            for (i, mut n) in sub.nodes.into_iter().enumerate() {
                n.parent = Some(n.parent.map_or(0, |p| p + offset));
                n.children.iter_mut().for_each(|c| *c += offset);
                debug_assert!(i > 0 || n.parent == Some(0));
                nodes.push(n);
            }
        }
        ClusteringTree { nodes }
    }

    pub fn root(&self) -> &FixTemplate {
        &self.nodes[0].template
    }

    pub fn root_index(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &ClusterNode {
        &self.nodes[i]
    }

    pub fn template(&self, i: usize) -> &FixTemplate {
        &self.nodes[i].template
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.nodes[i].children
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.nodes[i].parent
    }

    pub fn templates(&self) -> impl Iterator<Item = &FixTemplate> {
        self.nodes.iter().map(|n| &n.template)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &ClusterNode)> {
        self.nodes.iter().enumerate()
    }

    /// (parent, child) index pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.nodes
            .iter()
            .enumerate()
            .flat_map(|(p, n)| n.children.iter().map(move |&c| (p, c)))
            .collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].children.is_empty()).collect()
    }

    pub fn ancestors(&self, i: usize) -> Vec<usize> {
        std::iter::successors(self.nodes[i].parent, |&p| self.nodes[p].parent).collect()
    }

    /// Copy of the subtree rooted at `i`.
    pub fn subtree(&self, i: usize) -> ClusteringTree {
        let subs = self.nodes[i].children.iter().map(|&c| self.subtree(c)).collect();
        ClusteringTree::join(self.nodes[i].template.clone(), subs)
    }

    /// Copies of the subtrees below the root, in child order.
    pub fn root_subtrees(&self) -> Vec<ClusteringTree> {
        self.nodes[0].children.iter().map(|&c| self.subtree(c)).collect()
    }

    pub fn template_mut(&mut self, i: usize) -> &mut FixTemplate {
        &mut self.nodes[i].template
    }
}
