//! JSON persistence for templates, clustering trees and forests.
//!
//! Holes are written as the string `"ABS"`. Concrete strings that are equal to
//! `"ABS"` or start with a backslash are written with one extra leading
//! backslash.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::base_type::BaseType;
use super::cluster::ClusteringTree;
use super::fix_template::{category_of, Attachment, Category, ExternalContext, FixPattern, FixTemplate, InternalContext};
use super::tree::{Slot, Subtree, TemplateNode, TemplateTree};

pub const SCHEMA_VERSION: u32 = 1;
const HOLE: &str = "ABS";

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("invalid document: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> SchemaError {
    SchemaError::Invalid(msg.into())
}

fn escape(s: &str) -> String {
    if s == HOLE || s.starts_with('\\') {
        format!("\\{s}")
    } else {
        s.to_string()
    }
}

fn unescape(s: &str) -> String {
    s.strip_prefix('\\').map_or_else(|| s.to_string(), str::to_string)
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    i: usize,
    bt: String,
    t: String,
    #[serde(deserialize_with = "Option::deserialize")]
    v: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    nodes: Vec<NodeDoc>,
    edges: Vec<(usize, usize, String)>,
    #[serde(deserialize_with = "Option::deserialize")]
    rt: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct PatternDoc {
    before: TreeDoc,
    after: TreeDoc,
}

#[derive(Serialize, Deserialize)]
struct RnDoc {
    node: usize,
    br: String,
    ar: String,
}

#[derive(Serialize, Deserialize)]
struct InternalDoc {
    tree: TreeDoc,
    rn: Vec<RnDoc>,
}

#[derive(Serialize, Deserialize)]
struct ExternalDoc {
    before: TreeDoc,
    after: TreeDoc,
}

#[derive(Serialize, Deserialize)]
struct TemplateDoc {
    schema_version: u32,
    id: String,
    category: Category,
    pattern: PatternDoc,
    internal_context: InternalDoc,
    external_context: ExternalDoc,
    instance_count: usize,
    instance_ids: BTreeSet<String>,
    #[serde(default)]
    children: Vec<TemplateDoc>,
}

#[derive(Serialize, Deserialize)]
struct ForestDoc {
    schema_version: u32,
    trees: Vec<TemplateDoc>,
}

fn tree_doc(tree: &TemplateTree) -> TreeDoc {
    let nodes = tree
        .nodes()
        .map(|(i, n)| NodeDoc {
            i,
            bt: n.bt.as_val().map_or(HOLE.to_string(), |b| b.as_str().to_string()),
            t: n.t.as_val().map_or(HOLE.to_string(), |t| escape(t)),
            v: match &n.v {
                Slot::Abs => Some(HOLE.to_string()),
                Slot::Val(None) => None,
                Slot::Val(Some(v)) => Some(escape(v)),
            },
        })
        .collect();
    let edges = (0..tree.len())
        .flat_map(|p| tree.children(p).iter().map(move |&c| (p, c, tree.relation(c).to_string())))
        .collect();
    TreeDoc { nodes, edges, rt: tree.root() }
}

/// Rebuilds a tree; returns it with a map from document ids to node indices.
fn tree_from_doc(doc: &TreeDoc) -> Result<(TemplateTree, BTreeMap<usize, usize>), SchemaError> {
    let Some(rt) = doc.rt else {
        if !doc.nodes.is_empty() || !doc.edges.is_empty() {
            return Err(invalid("tree has nodes but a null root"));
        }
        return Ok((TemplateTree::empty(), BTreeMap::new()));
    };
    let mut nodes = BTreeMap::new();
    for n in &doc.nodes {
        let bt = if n.bt == HOLE {
            Slot::Abs
        } else {
            Slot::Val(n.bt.parse::<BaseType>().map_err(|e| invalid(e.to_string()))?)
        };
        let t = if n.t == HOLE { Slot::Abs } else { Slot::Val(unescape(&n.t)) };
        let v = match &n.v {
            Some(v) if v == HOLE => Slot::Abs,
            Some(v) => Slot::Val(Some(unescape(v))),
            None => Slot::Val(None),
        };
        if nodes.insert(n.i, TemplateNode { bt, t, v }).is_some() {
            return Err(invalid(format!("duplicate node id {}", n.i)));
        }
    }
    let mut children: BTreeMap<usize, Vec<(String, usize)>> = BTreeMap::new();
    let mut has_parent = BTreeSet::new();
    for (p, c, rel) in &doc.edges {
        if !nodes.contains_key(p) || !nodes.contains_key(c) {
            return Err(invalid(format!("edge ({p}, {c}) references a missing node")));
        }
        if !has_parent.insert(*c) {
            return Err(invalid(format!("node {c} has two parents")));
        }
        children.entry(*p).or_default().push((rel.clone(), *c));
    }
    if !nodes.contains_key(&rt) || has_parent.contains(&rt) {
        return Err(invalid(format!("root {rt} is missing or has a parent")));
    }
    let mut order = Vec::new();
    let sub = build(rt, &nodes, &children, &mut order, 0)?;
    if order.len() != nodes.len() {
        return Err(invalid("tree is not connected"));
    }
    let tree = TemplateTree::single(sub);
    let ids = order.into_iter().enumerate().map(|(new, old)| (old, new)).collect();
    Ok((tree, ids))
}

fn build(
    id: usize,
    nodes: &BTreeMap<usize, TemplateNode>,
    children: &BTreeMap<usize, Vec<(String, usize)>>,
    order: &mut Vec<usize>,
    depth: usize,
) -> Result<Subtree, SchemaError> {
    if depth > nodes.len() {
        return Err(invalid("tree contains a cycle"));
    }
    order.push(id);
    let mut sub = Subtree::leaf(nodes[&id].clone());
    for (rel, c) in children.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
        sub.children.push((rel.clone(), build(*c, nodes, children, order, depth + 1)?));
    }
    if sub.node.t.is_abs() && !sub.children.is_empty() {
        return Err(invalid(format!("type hole {id} has children")));
    }
    Ok(sub)
}

fn template_doc(tree: &ClusteringTree, i: usize) -> TemplateDoc {
    let t = tree.template(i);
    let mut doc = single_doc(t);
    doc.children = tree.children(i).iter().map(|&c| template_doc(tree, c)).collect();
    doc
}

fn single_doc(t: &FixTemplate) -> TemplateDoc {
    TemplateDoc {
        schema_version: SCHEMA_VERSION,
        id: t.id.clone(),
        category: t.category,
        pattern: PatternDoc { before: tree_doc(&t.pattern.before), after: tree_doc(&t.pattern.after) },
        internal_context: InternalDoc {
            tree: tree_doc(&t.ic.tree),
            rn: t.ic.rn.iter().map(|(&node, a)| RnDoc { node, br: a.br.clone(), ar: a.ar.clone() }).collect(),
        },
        external_context: ExternalDoc { before: tree_doc(&t.ec.before), after: tree_doc(&t.ec.after) },
        instance_count: t.instance_count,
        instance_ids: t.instance_ids.clone(),
        children: Vec::new(),
    }
}

fn template_from_doc(doc: &TemplateDoc) -> Result<FixTemplate, SchemaError> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(SchemaError::Version(doc.schema_version));
    }
    let (before, _) = tree_from_doc(&doc.pattern.before)?;
    let (after, _) = tree_from_doc(&doc.pattern.after)?;
    let (ic_tree, ids) = tree_from_doc(&doc.internal_context.tree)?;
    let mut rn = BTreeMap::new();
    for r in &doc.internal_context.rn {
        let node = *ids
            .get(&r.node)
            .ok_or_else(|| invalid(format!("rn references missing node {}", r.node)))?;
        rn.insert(node, Attachment { br: r.br.clone(), ar: r.ar.clone() });
    }
    let (ec_before, _) = tree_from_doc(&doc.external_context.before)?;
    let (ec_after, _) = tree_from_doc(&doc.external_context.after)?;
    let pattern = FixPattern::new(before, after);
    let category = category_of(&pattern).map_err(|e| invalid(format!("template {}: {e}", doc.id)))?;
    if category != doc.category {
        return Err(invalid(format!(
            "template {} is stored as {} but its pattern is {}",
            doc.id, doc.category, category
        )));
    }
    Ok(FixTemplate {
        id: doc.id.clone(),
        category,
        pattern,
        ic: InternalContext { tree: ic_tree, rn },
        ec: ExternalContext { before: ec_before, after: ec_after },
        instance_count: doc.instance_count,
        instance_ids: doc.instance_ids.clone(),
    })
}

fn cluster_from_doc(doc: &TemplateDoc) -> Result<ClusteringTree, SchemaError> {
    let template = template_from_doc(doc)?;
    let children = doc.children.iter().map(cluster_from_doc).collect::<Result<Vec<_>, _>>()?;
    Ok(ClusteringTree::join(template, children))
}

pub fn serialize_template(t: &FixTemplate) -> String {
    serde_json::to_string_pretty(&single_doc(t)).expect("template documents always serialize")
}

pub fn deserialize_template(text: &str) -> Result<FixTemplate, SchemaError> {
    let doc: TemplateDoc = serde_json::from_str(text)?;
    if !doc.children.is_empty() {
        return Err(invalid("a single template document must not have children"));
    }
    template_from_doc(&doc)
}

pub fn serialize_clustering_tree(tree: &ClusteringTree) -> String {
    serde_json::to_string_pretty(&template_doc(tree, tree.root_index())).expect("tree documents always serialize")
}

pub fn deserialize_clustering_tree(text: &str) -> Result<ClusteringTree, SchemaError> {
    let doc: TemplateDoc = serde_json::from_str(text)?;
    cluster_from_doc(&doc)
}

pub fn serialize_forest(trees: &[ClusteringTree]) -> String {
    let doc = ForestDoc {
        schema_version: SCHEMA_VERSION,
        trees: trees.iter().map(|t| template_doc(t, t.root_index())).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("forest documents always serialize")
}

pub fn deserialize_forest(text: &str) -> Result<Vec<ClusteringTree>, SchemaError> {
    let doc: ForestDoc = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(SchemaError::Version(doc.schema_version));
    }
    doc.trees.iter().map(cluster_from_doc).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::tree::tests::{expr_tree, stmt_tree};

    fn sample() -> FixTemplate {
        let before = expr_tree("x = isinstance(value, string_types)\n");
        let after = expr_tree("x = isinstance(to_native(value), string_types)\n");
        let ic = TemplateTree::single(stmt_tree("if a:\n    pass\n").subtree(0).clone_without_children());
        let mut rn = BTreeMap::new();
        rn.insert(0, Attachment { br: "test".into(), ar: "test".into() });
        let ec_before = stmt_tree("value = boolean(value)\n");
        FixTemplate::new(
            "T0",
            FixPattern::new(before, after),
            InternalContext { tree: ic, rn },
            ExternalContext { before: ec_before, after: TemplateTree::empty() },
            ["check".to_string()].into(),
        )
        .unwrap()
    }

    #[test]
    fn template_round_trip() {
        let t = sample();
        let text = serialize_template(&t);
        assert!(text.contains("\"schema_version\": 1"));
        assert_eq!(deserialize_template(&text).unwrap(), t);
    }

    #[test]
    fn holes_and_colliding_values() {
        let node = |v: Slot<Option<String>>| TemplateNode { bt: Slot::Val(BaseType::Variable), t: Slot::Val("Name".into()), v };
        let tree = TemplateTree::single(
            Subtree::leaf(TemplateNode::new(BaseType::Expr, "Tuple", None))
                .with("elts", Subtree::leaf(node(Slot::Abs)))
                .with("elts", Subtree::leaf(node(Slot::Val(Some("ABS".into())))))
                .with("elts", Subtree::leaf(node(Slot::Val(Some("\\x".into())))))
                .with("elts", Subtree::leaf(TemplateNode::type_hole(BaseType::Expr))),
        );
        let mut t = sample();
        t.pattern.after = tree;
        t.category = category_of(&t.pattern).unwrap();
        let back = deserialize_template(&serialize_template(&t)).unwrap();
        assert_eq!(back, t);
        assert!(back.pattern.after.node(1).v.is_abs());
        assert_eq!(back.pattern.after.node(2).value(), Some("ABS"));
        assert_eq!(back.pattern.after.node(3).value(), Some("\\x"));
    }

    #[test]
    fn missing_root_is_rejected() {
        let text = serialize_template(&sample());
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["pattern"]["before"].as_object_mut().unwrap().remove("rt");
        let err = deserialize_template(&value.to_string()).unwrap_err();
        assert!(matches!(err, SchemaError::Json(_)), "{err}");
    }

    #[test]
    fn unknown_version_is_rejected() {
        let text = serialize_template(&sample()).replace("\"schema_version\": 1", "\"schema_version\": 7");
        assert!(matches!(deserialize_template(&text), Err(SchemaError::Version(7))));
    }

    #[test]
    fn forest_round_trip() {
        let leaf = |id: &str| {
            let mut t = sample();
            t.id = id.into();
            ClusteringTree::leaf(t)
        };
        let tree = ClusteringTree::join(sample(), vec![leaf("a"), ClusteringTree::join(sample(), vec![leaf("b")])]);
        let forest = vec![tree.clone(), leaf("c")];
        let back = deserialize_forest(&serialize_forest(&forest)).unwrap();
        assert_eq!(back, forest);
        assert_eq!(deserialize_clustering_tree(&serialize_clustering_tree(&tree)).unwrap(), tree);
    }
}
