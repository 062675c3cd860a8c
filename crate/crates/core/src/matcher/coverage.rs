//! How many fixes a mined forest can express.

use rayon::prelude::*;
use serde::Serialize;

use crate::fix_parser::{analyze_fix, parse_fix, FixInstance, DEFAULT_WINDOW};
use crate::miner::mine_corpus;
use crate::template::{BaseTypeTable, ClusteringTree, FixTemplate};

use super::tree_match::tree_matches;
use super::view::{template_matches_view, BuggyProgramView};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixCoverage {
    pub id: String,
    pub covered: bool,
    pub matched_template_ids: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    /// Fixes that produced a template; failures are listed but not counted.
    pub total: usize,
    pub covered: usize,
    pub ratio: f64,
    pub per_fix: Vec<FixCoverage>,
}

/// Whether `general` subsumes the specific template of a fix: the fix's
/// buggy program matches it and the fix's fixed tree matches its fixed tree.
pub fn subsumes(general: &FixTemplate, specific: &FixTemplate, view: &BuggyProgramView) -> bool {
    template_matches_view(view, general) && tree_matches(&specific.pattern.after, &general.pattern.after)
}

fn fix_coverage(forest: &[ClusteringTree], inst: &FixInstance) -> FixCoverage {
    let table = BaseTypeTable::builtin();
    match analyze_fix(inst, table, DEFAULT_WINDOW) {
        Err(e) => FixCoverage { id: inst.id.clone(), covered: false, matched_template_ids: Vec::new(), error: Some(e.to_string()) },
        Ok(parsed) => {
            let view = BuggyProgramView::from_parsed(&parsed, DEFAULT_WINDOW, table);
            let matched: Vec<String> = forest
                .iter()
                .flat_map(ClusteringTree::templates)
                .filter(|t| subsumes(t, &parsed.template, &view))
                .map(|t| t.id.clone())
                .collect();
            FixCoverage { id: inst.id.clone(), covered: !matched.is_empty(), matched_template_ids: matched, error: None }
        }
    }
}

fn report(per_fix: Vec<FixCoverage>) -> CoverageReport {
    let total = per_fix.iter().filter(|f| f.error.is_none()).count();
    let covered = per_fix.iter().filter(|f| f.covered).count();
    let ratio = if total == 0 { 0.0 } else { covered as f64 / total as f64 };
    CoverageReport { total, covered, ratio, per_fix }
}

/// Fraction of fixes subsumed by some template of the forest.
pub fn template_coverage(forest: &[ClusteringTree], fixes: &[FixInstance]) -> CoverageReport {
    report(fixes.par_iter().map(|inst| fix_coverage(forest, inst)).collect())
}

/// Coverage of each fix by a forest mined, with the given pruning
/// threshold, from all the other fixes.
pub fn leave_one_out_coverage(fixes: &[FixInstance], min_frequency: usize) -> CoverageReport {
    let templates: Vec<Option<FixTemplate>> = fixes.par_iter().map(|f| parse_fix(f).ok()).collect();
    report(
        (0..fixes.len())
            .into_par_iter()
            .map(|i| {
                let rest: Vec<FixTemplate> =
                    templates.iter().enumerate().filter(|&(j, _)| j != i).filter_map(|(_, t)| t.clone()).collect();
                let (forest, _) = mine_corpus(rest, min_frequency);
                fix_coverage(&forest, &fixes[i])
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::mine;

    #[test]
    fn self_and_empty_coverage() {
        let fixes = vec![
            FixInstance::from_sources("a", "x = a + b\n", "x = to_bytes(a + b)\n"),
            FixInstance::from_sources("b", "x = a % b\n", "x = to_native(a % b)\n"),
            FixInstance::from_sources("bad", "x = (\n", "x = 1\n"),
        ];
        let templates = fixes.iter().filter_map(|f| parse_fix(f).ok()).collect();
        let forest = mine(templates);
        let report = template_coverage(&forest, &fixes);
        assert_eq!((report.total, report.covered, report.ratio), (2, 2, 1.0));
        assert!(report.per_fix[2].error.is_some());
        let unseen = [FixInstance::from_sources("c", "x = a - b\n", "x = to_text(a - b)\n")];
        assert_eq!(template_coverage(&forest, &unseen).ratio, 1.0);
        assert_eq!(template_coverage(&[], &fixes).ratio, 0.0);
    }

    #[test]
    fn leave_one_out_needs_a_sibling() {
        let fixes = vec![
            FixInstance::from_sources("a", "x = a + b\n", "x = to_bytes(a + b)\n"),
            FixInstance::from_sources("b", "x = a % b\n", "x = to_native(a % b)\n"),
            FixInstance::from_sources("c", "x = a - b\n", "x = to_text(a - b)\n"),
            FixInstance::from_sources("d", "def f(x):\n    return x\n", "def f(x):\n    pass\n"),
        ];
        let r = leave_one_out_coverage(&fixes, 1);
        assert_eq!(r.per_fix.iter().map(|f| f.covered).collect::<Vec<_>>(), [true, true, true, false]);
        assert_eq!(leave_one_out_coverage(&fixes[..1], 1).ratio, 0.0);
    }
}
