//! Line-level diffs and splitting of commits into single-site instances.

use std::collections::BTreeMap;

use diffy::{DiffOptions, Line, Patch};

use super::{FixInstance, FixParseError, Side};
use crate::syntax::{parse_source, NodeId, SourceSpan, SyntaxTree};

/// Modified lines allowed per commit before it is rejected.
pub const DEFAULT_LINE_LIMIT: usize = 50;

/// One contiguous change: `old_len` buggy lines starting at 0-based index
/// `old_start` are replaced by `new_len` fixed lines starting at `new_start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChangeBlock {
    pub old_start: usize,
    pub old_len: usize,
    pub new_start: usize,
    pub new_len: usize,
}

impl ChangeBlock {
    pub fn deleted(&self) -> Option<SourceSpan> {
        span(self.old_start, self.old_len)
    }

    pub fn added(&self) -> Option<SourceSpan> {
        span(self.new_start, self.new_len)
    }

    pub fn modified_lines(&self) -> usize {
        self.old_len + self.new_len
    }
}

fn span(start: usize, len: usize) -> Option<SourceSpan> {
    (len > 0).then(|| SourceSpan::new(start as u32 + 1, (start + len) as u32))
}

/// Zero-context line diff of two texts.
pub fn change_blocks(buggy: &str, fixed: &str) -> Vec<ChangeBlock> {
    let patch = DiffOptions::new().set_context_len(0).create_patch(buggy, fixed);
    blocks_of(&patch)
}

fn blocks_of(patch: &Patch<'_, str>) -> Vec<ChangeBlock> {
    let mut out = Vec::new();
    for hunk in patch.hunks() {
        let (old, new) = (hunk.old_range(), hunk.new_range());
        // An empty range's start names the line before the change.
        let mut o = if old.is_empty() { old.start() } else { old.start() - 1 };
        let mut n = if new.is_empty() { new.start() } else { new.start() - 1 };
        let mut cur: Option<ChangeBlock> = None;
        for line in hunk.lines() {
            match line {
                Line::Context(_) => {
                    out.extend(cur.take());
                    o += 1;
                    n += 1;
                }
                Line::Delete(_) => {
                    let b = cur.get_or_insert(ChangeBlock { old_start: o, old_len: 0, new_start: n, new_len: 0 });
                    b.old_len += 1;
                    o += 1;
                }
                Line::Insert(_) => {
                    let b = cur.get_or_insert(ChangeBlock { old_start: o, old_len: 0, new_start: n, new_len: 0 });
                    b.new_len += 1;
                    n += 1;
                }
            }
        }
        out.extend(cur);
    }
    out
}

/// Applies a unified diff to `buggy`.
pub fn apply_unified_diff(buggy: &str, diff: &str) -> Result<String, FixParseError> {
    let patch = Patch::from_str(diff).map_err(|e| FixParseError::UnparseableDiff(e.to_string()))?;
    diffy::apply(buggy, &patch).map_err(|e| FixParseError::UnparseableDiff(e.to_string()))
}

/// Splits one commit into fix instances, one per group of connected changes.
///
/// Two change blocks are connected when the deepest statements they touch
/// are the same or nested, in either version. Blocks that touch no
/// statement (comments, blank lines) are dropped. Each instance's fixed
/// source is the buggy source with only its own blocks applied.
pub fn split_fix(id: &str, buggy: &str, fixed: &str, limit: usize) -> Result<Vec<FixInstance>, FixParseError> {
    let blocks = change_blocks(buggy, fixed);
    let modified: usize = blocks.iter().map(ChangeBlock::modified_lines).sum();
    if modified > limit {
        return Err(FixParseError::OversizeCommit { lines: modified, limit });
    }
    let btree = parse_source(buggy).map_err(|e| FixParseError::Syntax { side: Side::Buggy, error: e })?;
    let ftree = parse_source(fixed).map_err(|e| FixParseError::Syntax { side: Side::Fixed, error: e })?;

    let touched: Vec<(Vec<NodeId>, Vec<NodeId>)> = blocks
        .iter()
        .map(|b| {
            let old = b.deleted().map(|s| btree.deepest_statements(&[s]).unwrap_or_default()).unwrap_or_default();
            let new = b.added().map(|s| ftree.deepest_statements(&[s]).unwrap_or_default()).unwrap_or_default();
            (old, new)
        })
        .collect();
    let live: Vec<usize> = (0..blocks.len())
        .filter(|&i| !touched[i].0.is_empty() || !touched[i].1.is_empty())
        .collect();
    if live.is_empty() {
        return Err(FixParseError::EmptyChange);
    }

    let mut group: Vec<usize> = (0..blocks.len()).collect();
    for (x, &i) in live.iter().enumerate() {
        for &j in &live[x + 1..] {
            if related(&btree, &touched[i].0, &touched[j].0) || related(&ftree, &touched[i].1, &touched[j].1) {
                let (gi, gj) = (find(&mut group, i), find(&mut group, j));
                group[gi.max(gj)] = gi.min(gj);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &live {
        let g = find(&mut group, i);
        groups.entry(g).or_default().push(i);
    }

    if groups.len() == 1 {
        return Ok(vec![FixInstance::from_blocks(id, buggy, fixed, &blocks)]);
    }
    let mut out = Vec::new();
    for (n, members) in groups.values().enumerate() {
        let partial = apply_blocks(buggy, fixed, &blocks, members);
        if parse_source(&partial).is_err() {
            log::warn!("{id}: a partial fix does not parse, keeping the commit whole");
            return Ok(vec![FixInstance::from_blocks(id, buggy, fixed, &blocks)]);
        }
        let sub_blocks = change_blocks(buggy, &partial);
        out.push(FixInstance::from_blocks(&format!("{id}#{}", n + 1), buggy, &partial, &sub_blocks));
    }
    Ok(out)
}

fn find(group: &mut [usize], mut i: usize) -> usize {
    while group[i] != i {
        group[i] = group[group[i]];
        i = group[i];
    }
    i
}

fn related(tree: &SyntaxTree, a: &[NodeId], b: &[NodeId]) -> bool {
    a.iter()
        .any(|&x| b.iter().any(|&y| x == y || tree.is_ancestor(x, y) || tree.is_ancestor(y, x)))
}

fn apply_blocks(buggy: &str, fixed: &str, blocks: &[ChangeBlock], members: &[usize]) -> String {
    let old: Vec<&str> = buggy.split_inclusive('\n').collect();
    let new: Vec<&str> = fixed.split_inclusive('\n').collect();
    let mut out = String::new();
    let mut pos = 0;
    for &i in members {
        let b = blocks[i];
        out.extend(old[pos..b.old_start].iter().copied());
        out.extend(new[b.new_start..b.new_start + b.new_len].iter().copied());
        pos = b.old_start + b.old_len;
    }
    out.extend(old[pos..].iter().copied());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_of_mixed_edit() {
        let a = "a = 1\nb = 2\nc = 3\n";
        let b = "a = 1\nb = 20\nc = 3\nd = 4\n";
        let blocks = change_blocks(a, b);
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].deleted(), Some(SourceSpan::line(2)));
        assert_eq!(blocks[0].added(), Some(SourceSpan::line(2)));
        assert_eq!(blocks[1].deleted(), None);
        assert_eq!(blocks[1].added(), Some(SourceSpan::line(4)));
        assert_eq!(blocks[1].old_start, 3);
    }

    #[test]
    fn pure_insertion_at_start() {
        let blocks = change_blocks("x = 1\n", "import os\nx = 1\n");
        assert_eq!(blocks, vec![ChangeBlock { old_start: 0, old_len: 0, new_start: 0, new_len: 1 }]);
    }

    #[test]
    fn two_functions_split_into_two_instances() {
        let buggy = "def f(a):\n    return a + 1\n\n\ndef g(b):\n    return b * 2\n";
        let fixed = "def f(a):\n    return int(a) + 1\n\n\ndef g(b):\n    return str(b) * 2\n";
        let insts = split_fix("c1", buggy, fixed, DEFAULT_LINE_LIMIT).unwrap();
        assert_eq!(insts.len(), 2);
        assert_eq!(insts[0].id, "c1#1");
        assert!(insts[0].fixed_src.contains("int(a)") && !insts[0].fixed_src.contains("str(b)"));
        assert!(insts[1].fixed_src.contains("str(b)") && !insts[1].fixed_src.contains("int(a)"));
    }

    #[test]
    fn nested_changes_stay_together() {
        let buggy = "if isinstance(value, str):\n    x = value\n";
        let fixed = "if isinstance(value, bytes):\n    x = value.decode()\n";
        let insts = split_fix("c2", buggy, fixed, DEFAULT_LINE_LIMIT).unwrap();
        assert_eq!(insts.len(), 1);
        assert_eq!(insts[0].fixed_src, fixed);
    }

    #[test]
    fn oversize_commit() {
        let buggy: String = (0..30).map(|i| format!("x{i} = {i}\n")).collect();
        let fixed: String = (0..30).map(|i| format!("x{i} = {}\n", i + 1)).collect();
        let err = split_fix("big", &buggy, &fixed, DEFAULT_LINE_LIMIT).unwrap_err();
        assert!(matches!(err, FixParseError::OversizeCommit { lines: 60, limit: 50 }));
    }

    #[test]
    fn comment_only_change_is_empty() {
        let err = split_fix("c", "x = 1  # a\n", "x = 1  # b\n", 50);
        // The line holds a statement, so the block is live; extraction later
        // reports the empty change.
        assert!(err.is_ok());
        let err = split_fix("c", "# a\nx = 1\n", "# b\nx = 1\n", 50).unwrap_err();
        assert!(matches!(err, FixParseError::EmptyChange));
    }

    #[test]
    fn unified_diff_round_trip() {
        let buggy = "a = 1\nb = 2\n";
        let fixed = "a = 1\nb = str(2)\n";
        let diff = diffy::create_patch(buggy, fixed).to_string();
        assert_eq!(apply_unified_diff(buggy, &diff).unwrap(), fixed);
        assert!(apply_unified_diff(buggy, "@@ nonsense").is_err());
    }
}
