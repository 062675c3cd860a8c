//! Hierarchical clustering of specific fix templates into clustering trees.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::abstraction::{abstract_external, abstract_internal, abstract_pattern, context_pairs};
use crate::metrics::{DistanceCache, DistanceReport};
use crate::template::{category_of, Attachment, Category, ClusteringTree, FixTemplate, TreeHash};

/// Component handled by a clustering stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    External,
    Internal,
    Pattern,
}

/// Counters of one mining run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MiningStats {
    pub iterations: usize,
    /// Upper bound on the number of iterations that change anything.
    pub bound: usize,
    pub dedups: usize,
    pub ec_merges: usize,
    pub ic_abstractions: usize,
    pub p_abstractions: usize,
}

type PatternKey = (TreeHash, TreeHash);
type InternalKey = (TreeHash, Vec<(usize, Attachment)>);

fn pattern_key(t: &FixTemplate) -> PatternKey {
    (t.pattern.before.hash(), t.pattern.after.hash())
}

fn internal_key(t: &FixTemplate) -> InternalKey {
    (t.ic.tree.hash(), t.ic.rn.iter().map(|(&n, a)| (n, a.clone())).collect())
}

/// Groups the indices of `templates` for one stage: templates with equal
/// pattern and internal context for the external stage, equal pattern for
/// the internal stage, and a single group for the pattern stage. Only groups
/// of two or more are returned, ordered by their smallest content hash.
pub fn select_clusters(stage: Stage, templates: &[FixTemplate]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = match stage {
        Stage::Pattern => vec![(0..templates.len()).collect()],
        Stage::Internal => {
            let mut m: BTreeMap<PatternKey, Vec<usize>> = BTreeMap::new();
            for (i, t) in templates.iter().enumerate() {
                m.entry(pattern_key(t)).or_default().push(i);
            }
            m.into_values().collect()
        }
        Stage::External => {
            let mut m: BTreeMap<(PatternKey, InternalKey), Vec<usize>> = BTreeMap::new();
            for (i, t) in templates.iter().enumerate() {
                m.entry((pattern_key(t), internal_key(t))).or_default().push(i);
            }
            m.into_values().collect()
        }
    };
    groups.retain(|g| g.len() >= 2);
    for g in &mut groups {
        g.sort_by_key(|&i| templates[i].content_hash());
    }
    groups.sort_by_key(|g| templates[g[0]].content_hash());
    groups
}

/// Drops trees whose root represents fewer than `min_frequency` instances.
pub fn prune_trees(trees: Vec<ClusteringTree>, min_frequency: usize) -> Vec<ClusteringTree> {
    trees.into_iter().filter(|t| t.root().instance_count >= min_frequency).collect()
}

/// Mines clustering trees from specific templates of one category.
pub fn mine(templates: Vec<FixTemplate>) -> Vec<ClusteringTree> {
    Miner::new().run(templates).0
}

/// Partitions templates by category and mines each part.
pub fn mine_by_category(templates: Vec<FixTemplate>) -> BTreeMap<Category, (Vec<ClusteringTree>, MiningStats)> {
    let mut parts: BTreeMap<Category, Vec<FixTemplate>> = BTreeMap::new();
    for t in templates {
        parts.entry(t.category).or_default().push(t);
    }
    parts.into_iter().map(|(c, ts)| (c, Miner::new().run(ts))).collect()
}

/// Clustering state shared across iterations: the distance memo.
#[derive(Debug, Default)]
pub struct Miner {
    cache: DistanceCache,
}

struct Candidate {
    i: usize,
    j: usize,
    report: DistanceReport,
    key: (bool, u64, TreeHash, TreeHash),
}

impl Miner {
    pub fn new() -> Self {
        Miner::default()
    }

    fn distance(&self, stage: Stage, a: &FixTemplate, b: &FixTemplate) -> DistanceReport {
        match stage {
            Stage::External => self.cache.external(&a.ec, &b.ec),
            Stage::Internal => self.cache.internal(&a.ic, &b.ic),
            Stage::Pattern => self.cache.pattern(&a.pattern, &b.pattern),
        }
    }

    /// Pairs of `group` ordered for selection: structural distance zero
    /// first, then by value distance, ties by content hash.
    fn candidates(&self, stage: Stage, forest: &[ClusteringTree], group: &[usize]) -> Vec<Candidate> {
        let pairs: Vec<(usize, usize)> =
            group.iter().enumerate().flat_map(|(k, &i)| group[k + 1..].iter().map(move |&j| (i, j))).collect();
        let mut out: Vec<Candidate> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (a, b) = (forest[i].root(), forest[j].root());
                let report = self.distance(stage, a, b);
                let (ha, hb) = (a.content_hash(), b.content_hash());
                let (lo, hi) = if ha <= hb { (ha, hb) } else { (hb, ha) };
                let key = (report.sd != 0.0, report.d.to_bits(), lo, hi);
                Candidate { i, j, report, key }
            })
            .collect();
        out.sort_by(|x, y| x.key.cmp(&y.key));
        out
    }

    /// Runs the clustering loop to a fixed point.
    pub fn run(&self, templates: Vec<FixTemplate>) -> (Vec<ClusteringTree>, MiningStats) {
        let mut stats = MiningStats {
            bound: templates.iter().map(weight).sum::<usize>() + 1,
            ..MiningStats::default()
        };
        let mut forest: Vec<ClusteringTree> = templates.into_iter().map(ClusteringTree::leaf).collect();
        loop {
            stats.iterations += 1;
            assert!(stats.iterations <= stats.bound + 1, "mining exceeded its iteration bound");
            forest.sort_by_key(|t| t.root().content_hash());
            let mut changed = dedup(&mut forest, &mut stats);
            changed |= self.external_stage(&mut forest, &mut stats);
            if changed {
                continue;
            }
            if self.internal_stage(&mut forest, &mut stats) {
                continue;
            }
            if !self.pattern_stage(&mut forest, &mut stats) {
                break;
            }
        }
        stats.iterations -= 1;
        (finish(forest), stats)
    }

    fn external_stage(&self, forest: &mut Vec<ClusteringTree>, stats: &mut MiningStats) -> bool {
        let roots: Vec<FixTemplate> = forest.iter().map(|t| t.root().clone()).collect();
        let mut merges = Vec::new();
        for group in select_clusters(Stage::External, &roots) {
            let best = &self.candidates(Stage::External, forest, &group)[0];
            let (a, b) = (&roots[best.i], &roots[best.j]);
            let (pb, pa) = (context_pairs(&a.ec.before, &b.ec.before), context_pairs(&a.ec.after, &b.ec.after));
            let mut nt = a.clone();
            nt.ec = abstract_external(&a.ec, &b.ec, &pb, &pa);
            nt.instance_ids.extend(b.instance_ids.iter().cloned());
            nt.instance_count = nt.instance_ids.len();
            merges.push((best.i, best.j, nt));
        }
        let changed = !merges.is_empty();
        stats.ec_merges += merges.len();
        let mut slots: Vec<Option<ClusteringTree>> = std::mem::take(forest).into_iter().map(Some).collect();
        for (i, j, nt) in merges {
            let (ti, tj) = (slots[i].take().expect("fresh"), slots[j].take().expect("fresh"));
            slots[i] = Some(ClusteringTree::join(nt, vec![ti, tj]));
        }
        *forest = slots.into_iter().flatten().collect();
        changed
    }

    fn internal_stage(&self, forest: &mut [ClusteringTree], stats: &mut MiningStats) -> bool {
        let roots: Vec<FixTemplate> = forest.iter().map(|t| t.root().clone()).collect();
        let mut changed = false;
        for group in select_clusters(Stage::Internal, &roots) {
            let Some(best) = self
                .candidates(Stage::Internal, forest, &group)
                .into_iter()
                .find(|c| roots[c.i].ic != roots[c.j].ic)
            else {
                continue;
            };
            let (a, b) = (&roots[best.i], &roots[best.j]);
            let ic = abstract_internal(&a.ic, &b.ic, &context_pairs(&a.ic.tree, &b.ic.tree));
            for k in [best.i, best.j] {
                let mut nt = roots[k].clone();
                if nt.ic != ic {
                    nt.ic = ic.clone();
                    lift(&mut forest[k], nt);
                }
            }
            stats.ic_abstractions += 1;
            changed = true;
        }
        changed
    }

    fn pattern_stage(&self, forest: &mut [ClusteringTree], stats: &mut MiningStats) -> bool {
        let roots: Vec<FixTemplate> = forest.iter().map(|t| t.root().clone()).collect();
        for group in select_clusters(Stage::Pattern, &roots) {
            for c in self.candidates(Stage::Pattern, forest, &group) {
                let (a, b) = (&roots[c.i], &roots[c.j]);
                if (c.report.d == 1.0 && c.report.sd == 1.0) || a.pattern == b.pattern {
                    continue;
                }
                let Ok(p) = abstract_pattern(&a.pattern, &b.pattern) else { continue };
                if category_of(&p) != Ok(a.category) {
                    continue;
                }
                for k in [c.i, c.j] {
                    let mut nt = roots[k].clone();
                    if nt.pattern != p {
                        nt.pattern = p.clone();
                        lift(&mut forest[k], nt);
                    }
                }
                stats.p_abstractions += 1;
                return true;
            }
        }
        false
    }
}

/// Concrete attributes over all components; strictly decreases with every
/// change the loop makes.
fn weight(t: &FixTemplate) -> usize {
    [&t.pattern.before, &t.pattern.after, &t.ic.tree, &t.ec.before, &t.ec.after]
        .iter()
        .map(|c| c.concrete_weight())
        .sum()
}

/// Puts `nt` on top of `tree` as its new root.
fn lift(tree: &mut ClusteringTree, nt: FixTemplate) {
    let old = std::mem::replace(tree, ClusteringTree::leaf(nt.clone()));
    *tree = ClusteringTree::join(nt, vec![old]);
}

/// Merges trees whose roots are identical templates. Two leaves become one
/// leaf with both instance sets; otherwise the merged root adopts the
/// children of inner roots and the leaves themselves.
fn dedup(forest: &mut Vec<ClusteringTree>, stats: &mut MiningStats) -> bool {
    let mut by_content: BTreeMap<TreeHash, Vec<ClusteringTree>> = BTreeMap::new();
    for t in forest.drain(..) {
        by_content.entry(t.root().content_hash()).or_default().push(t);
    }
    let mut changed = false;
    for (_, mut same) in by_content {
        if same.len() == 1 {
            forest.push(same.pop().expect("one"));
            continue;
        }
        changed = true;
        stats.dedups += same.len() - 1;
        let mut root = same[0].root().clone();
        let mut ids = BTreeSet::new();
        let mut subtrees = Vec::new();
        let all_leaves = same.iter().all(|t| t.len() == 1);
        for t in same {
            ids.extend(t.root().instance_ids.iter().cloned());
            if t.len() == 1 {
                subtrees.push(t);
            } else {
                subtrees.extend(t.root_subtrees());
            }
        }
        root.instance_count = ids.len();
        root.instance_ids = ids;
        if all_leaves {
            forest.push(ClusteringTree::leaf(root));
        } else {
            forest.push(ClusteringTree::join(root, subtrees));
        }
    }
    changed
}

/// Orders trees by descending root frequency, ties by content hash, and
/// assigns ids `T{tree}-{node}`.
fn finish(mut forest: Vec<ClusteringTree>) -> Vec<ClusteringTree> {
    forest.sort_by(|a, b| {
        b.root().instance_count.cmp(&a.root().instance_count).then(a.root().content_hash().cmp(&b.root().content_hash()))
    });
    for (k, tree) in forest.iter_mut().enumerate() {
        for n in 0..tree.len() {
            tree.template_mut(n).id = format!("T{k}-{n}");
        }
    }
    forest
}

/// Per-category summary of a mining run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CategoryReport {
    pub category: Category,
    pub instances: usize,
    pub trees: usize,
    pub templates: usize,
    pub kept_trees: usize,
    pub kept_instances: usize,
    pub stats: MiningStats,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MiningReport {
    pub min_frequency: usize,
    pub categories: Vec<CategoryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

/// Mines every category, prunes rare trees and summarizes the run.
pub fn mine_corpus(templates: Vec<FixTemplate>, min_frequency: usize) -> (Vec<ClusteringTree>, MiningReport) {
    let mut kept_all = Vec::new();
    let mut categories = Vec::new();
    for (category, (trees, stats)) in mine_by_category(templates) {
        let instances = trees.iter().map(|t| t.root().instance_count).sum();
        let (count, templates) = (trees.len(), trees.iter().map(ClusteringTree::len).sum());
        let kept = prune_trees(trees, min_frequency);
        categories.push(CategoryReport {
            category,
            instances,
            trees: count,
            templates,
            kept_trees: kept.len(),
            kept_instances: kept.iter().map(|t| t.root().instance_count).sum(),
            stats,
        });
        kept_all.extend(kept);
    }
    (kept_all, MiningReport { min_frequency, categories, wall_time_ms: None })
}
