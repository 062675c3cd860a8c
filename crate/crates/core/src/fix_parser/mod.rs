//! Turning one bug fix into a specific fix template.

pub mod change;
pub mod context;
pub mod corpus;
pub mod diff;

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use crate::syntax::{parse_source, NodeId, SourceSpan, SyntaxError, SyntaxTree};
use crate::template::{BaseTypeTable, FixPattern, FixTemplate, InternalContext, InvalidPattern, TemplateTree};

pub use change::{align, run_tree, split_level, Region};
pub use context::{build_external_context, context_window, shared_variables, DEFAULT_WINDOW};
pub use corpus::{load_corpus, CorpusEntry};
pub use diff::{apply_unified_diff, change_blocks, split_fix, ChangeBlock, DEFAULT_LINE_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Buggy,
    Fixed,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Buggy => "buggy",
            Side::Fixed => "fixed",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FixParseError {
    #[error("{side} version does not parse: {error}")]
    Syntax { side: Side, error: SyntaxError },
    #[error("the fix changes no statement")]
    EmptyChange,
    #[error("commit modifies {lines} lines (limit {limit})")]
    OversizeCommit { lines: usize, limit: usize },
    #[error("unparseable diff: {0}")]
    UnparseableDiff(String),
    #[error("no statement to anchor the inserted code")]
    NoAnchor,
    #[error(transparent)]
    InvalidPattern(#[from] InvalidPattern),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Layout(String),
}

/// One bug fix: both versions of a file and the lines the diff touches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixInstance {
    pub id: String,
    pub buggy_src: String,
    pub fixed_src: String,
    pub deleted_lines: Vec<SourceSpan>,
    pub added_lines: Vec<SourceSpan>,
}

impl FixInstance {
    /// Instance whose line information comes from diffing the two sources.
    pub fn from_sources(id: impl Into<String>, buggy: impl Into<String>, fixed: impl Into<String>) -> Self {
        let (buggy, fixed) = (buggy.into(), fixed.into());
        let blocks = change_blocks(&buggy, &fixed);
        FixInstance::from_blocks(&id.into(), &buggy, &fixed, &blocks)
    }

    pub(crate) fn from_blocks(id: &str, buggy: &str, fixed: &str, blocks: &[ChangeBlock]) -> Self {
        FixInstance {
            id: id.to_string(),
            buggy_src: buggy.to_string(),
            fixed_src: fixed.to_string(),
            deleted_lines: blocks.iter().filter_map(ChangeBlock::deleted).collect(),
            added_lines: blocks.iter().filter_map(ChangeBlock::added).collect(),
        }
    }

    pub fn modified_line_count(&self) -> usize {
        self.deleted_lines.iter().chain(&self.added_lines).map(SourceSpan::len).sum()
    }
}

/// Where inserted statements go relative to the anchor statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AddPosition {
    Before,
    After,
}

/// A parsed fix together with everything needed to replay it.
#[derive(Clone, Debug)]
pub struct ParsedFix {
    pub template: FixTemplate,
    pub buggy: SyntaxTree,
    pub fixed: SyntaxTree,
    pub region: Region,
    /// Buggy statements that locate the bug: the changed statements, or the
    /// anchor of a pure insertion.
    pub site: Vec<NodeId>,
    pub add_position: Option<AddPosition>,
}

impl ParsedFix {
    pub fn id(&self) -> &str {
        &self.template.id
    }

    /// Line spans of the site statements in the buggy source.
    pub fn bug_lines(&self) -> Vec<SourceSpan> {
        self.site.iter().map(|&s| self.buggy.node(s).span.lines()).collect()
    }
}

/// The changed statement trees of a fix, before pruning.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub buggy: SyntaxTree,
    pub fixed: SyntaxTree,
    pub region: Region,
    pub bug_tree: TemplateTree,
    pub fix_tree: TemplateTree,
}

pub fn extract_change(inst: &FixInstance, table: &BaseTypeTable) -> Result<Extraction, FixParseError> {
    let buggy = parse_source(&inst.buggy_src).map_err(|e| FixParseError::Syntax { side: Side::Buggy, error: e })?;
    let fixed = parse_source(&inst.fixed_src).map_err(|e| FixParseError::Syntax { side: Side::Fixed, error: e })?;
    let region = align(&buggy, &fixed).ok_or(FixParseError::EmptyChange)?;
    let bug_tree = run_tree(&buggy, &region.buggy, table);
    let fix_tree = run_tree(&fixed, &region.fixed, table);
    Ok(Extraction { buggy, fixed, region, bug_tree, fix_tree })
}

/// Parses a fix into its specific template and replay information.
pub fn analyze_fix(inst: &FixInstance, table: &BaseTypeTable, window: usize) -> Result<ParsedFix, FixParseError> {
    let ex = extract_change(inst, table)?;
    let (pattern, ic): (FixPattern, InternalContext) = split_level(&ex.bug_tree, &ex.fix_tree)?;
    let (site, add_position) = if ex.region.buggy.is_empty() {
        let list: Vec<NodeId> = ex.buggy.node(ex.region.buggy_parent).children_in(&ex.region.relation).collect();
        let i = ex.region.buggy_index;
        if i < list.len() {
            (vec![list[i]], Some(AddPosition::Before))
        } else if i > 0 {
            (vec![list[i - 1]], Some(AddPosition::After))
        } else {
            return Err(FixParseError::NoAnchor);
        }
    } else {
        (ex.region.buggy.clone(), None)
    };
    let ec = build_external_context(&ex.buggy, &site, &pattern, window, table);
    let template = FixTemplate::new(inst.id.clone(), pattern, ic, ec, BTreeSet::from([inst.id.clone()]))?;
    Ok(ParsedFix { template, buggy: ex.buggy, fixed: ex.fixed, region: ex.region, site, add_position })
}

/// Parses a fix into a specific fix template.
pub fn parse_fix(inst: &FixInstance) -> Result<FixTemplate, FixParseError> {
    analyze_fix(inst, BaseTypeTable::builtin(), DEFAULT_WINDOW).map(|p| p.template)
}
