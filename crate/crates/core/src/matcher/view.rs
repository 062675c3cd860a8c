//! The buggy program as seen by the matcher: the bug statements and the
//! statements around them, as template trees.

use crate::fix_parser::{analyze_fix, context_window, FixInstance, FixParseError, ParsedFix, DEFAULT_WINDOW};
use crate::syntax::{NodeId, SourceSpan, SyntaxTree};
use crate::template::{BaseTypeTable, FixTemplate, Subtree, TemplateTree};

use super::tree_match::tree_matches;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("no statement covers the bug lines")]
pub struct NoBugStatement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuggyProgramView {
    /// The bug statements, grouped when there are several.
    pub bug: TemplateTree,
    /// Statements preceding the bug, always under a group root.
    pub before: TemplateTree,
    /// Statements following the bug, always under a group root.
    pub after: TemplateTree,
    pub site: Vec<NodeId>,
    /// Syntax node behind each node of `bug`; `None` for a group root.
    pub origin: Vec<Option<NodeId>>,
}

impl BuggyProgramView {
    pub fn from_statements(tree: &SyntaxTree, site: &[NodeId], window: usize, table: &BaseTypeTable) -> Self {
        let mut origin = Vec::new();
        let mut items = Vec::new();
        for &s in site {
            let (t, ids) = TemplateTree::from_syntax(tree, s, table);
            items.extend(t.to_subtree());
            origin.extend(ids.into_iter().map(Some));
        }
        if items.len() > 1 {
            origin.insert(0, None);
        }
        let bug = TemplateTree::from_subtree(Subtree::group(items));
        let (before, after) = context_window(tree, site, window);
        let context = |stmts: &[NodeId]| {
            let items = stmts.iter().filter_map(|&s| TemplateTree::from_syntax(tree, s, table).0.to_subtree()).collect();
            TemplateTree::from_subtree(Subtree::group_always(items))
        };
        BuggyProgramView { bug, before: context(&before), after: context(&after), site: site.to_vec(), origin }
    }

    /// View of the deepest statements covering `lines` (1-based).
    pub fn from_lines(
        tree: &SyntaxTree,
        lines: &[SourceSpan],
        window: usize,
        table: &BaseTypeTable,
    ) -> Result<Self, NoBugStatement> {
        let site = tree.deepest_statements(lines).map_err(|_| NoBugStatement)?;
        Ok(BuggyProgramView::from_statements(tree, &site, window, table))
    }

    /// View of the buggy side of a parsed fix, located at its edit site.
    pub fn from_parsed(parsed: &ParsedFix, window: usize, table: &BaseTypeTable) -> Self {
        BuggyProgramView::from_statements(&parsed.buggy, &parsed.site, window, table)
    }

    pub fn from_fix(inst: &FixInstance) -> Result<Self, FixParseError> {
        let table = BaseTypeTable::builtin();
        Ok(BuggyProgramView::from_parsed(&analyze_fix(inst, table, DEFAULT_WINDOW)?, DEFAULT_WINDOW, table))
    }
}

/// A program matches a template when its surrounding statements match the
/// external context and its bug statements match the pattern's buggy side
/// joined to the internal context.
pub fn template_matches_view(view: &BuggyProgramView, tpl: &FixTemplate) -> bool {
    tree_matches(&view.before, &tpl.ec.before)
        && tree_matches(&view.after, &tpl.ec.after)
        && tree_matches(&view.bug, &tpl.buggy_side())
}
