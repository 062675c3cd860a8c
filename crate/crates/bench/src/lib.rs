//! Benchmarks for the mining and matching pipeline; see `benches/`.

use std::path::PathBuf;

use tyfix_core::fix_parser::{load_corpus, FixInstance, DEFAULT_LINE_LIMIT};

/// The fix instances of a corpus directory under the repository's `corpus/`.
pub fn corpus(name: &str) -> Vec<FixInstance> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    load_corpus(&root, DEFAULT_LINE_LIMIT)
        .expect("corpus loads")
        .into_iter()
        .filter_map(|e| e.result.ok())
        .flatten()
        .collect()
}
