#![allow(dead_code)]

pub mod oracles;
pub mod trees;

use std::path::PathBuf;

use tyfix_core::fix_parser::{load_corpus, parse_fix, FixInstance, DEFAULT_LINE_LIMIT};
use tyfix_core::template::{
    BaseType, ClusteringTree, ExternalContext, FixTemplate, InternalContext, Slot, Subtree, TemplateTree,
};

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Every fix instance of a corpus directory, in directory order.
pub fn load_instances(name: &str) -> Vec<FixInstance> {
    let entries = load_corpus(&repo_root().join("corpus").join(name), DEFAULT_LINE_LIMIT).expect("corpus loads");
    entries.into_iter().flat_map(|e| e.result.expect("fix loads")).collect()
}

/// Seed fixes of the hand-written baseline pack.
const BASELINE_SEEDS: [(&str, &str); 9] = [
    ("s = 'n=' + n\n", "s = 'n=' + str(n)\n"),
    ("r = a / b\n", "r = a // b\n"),
    ("for k, v in d.iteritems():\n    print(k)\n", "for k, v in d.items():\n    print(k)\n"),
    (
        "def f(x):\n    return x.name\n",
        "def f(x):\n    if x is None:\n        return None\n    return x.name\n",
    ),
    ("t = data.decode('utf-8')\n", "t = data\n"),
    ("s = unicode(x)\n", "s = str(x)\n"),
    ("r = range(n)\n", "r = range(int(n))\n"),
    ("k = d.keys()\n", "k = list(d.keys())\n"),
    ("b = s\n", "b = s.encode('utf-8')\n"),
];

fn generalize(t: &TemplateTree) -> TemplateTree {
    fn walk(s: &Subtree) -> Subtree {
        let mut node = s.node.clone();
        if matches!(node.base_type(), Some(BaseType::Variable | BaseType::Literal)) {
            node.v = Slot::Abs;
        }
        s.children.iter().fold(Subtree::leaf(node), |acc, (r, c)| acc.with(r.clone(), walk(c)))
    }
    TemplateTree::from_subtree(t.to_subtree().map(|s| walk(&s)))
}

/// Nine hand-written templates: the fix pattern of each seed with variable
/// and literal values left open, and no context.
pub fn baseline_pack() -> Vec<ClusteringTree> {
    BASELINE_SEEDS
        .iter()
        .enumerate()
        .map(|(i, (b, f))| {
            let mut t: FixTemplate = parse_fix(&FixInstance::from_sources(format!("base{i}"), *b, *f)).expect("seed parses");
            t.pattern.before = generalize(&t.pattern.before);
            t.pattern.after = generalize(&t.pattern.after);
            t.ic = InternalContext::empty();
            t.ec = ExternalContext::empty();
            ClusteringTree::leaf(t)
        })
        .collect()
}
