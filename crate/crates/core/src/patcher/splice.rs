//! Rendering a modified program as the original text with only the changed
//! statements rewritten.

use crate::syntax::{parse_source, unparse_with_holes, Fragment, NodeId, NodeValue, SyntaxTree, UnparseError, STATEMENT_RELATIONS};

/// How a modified program becomes text.
#[derive(Clone, Copy, Debug)]
pub enum Rendering<'a> {
    /// Normalized rendering of the whole program.
    Whole,
    /// The original source of `program`, with the statements that differ in
    /// the modified tree rendered in place at their original indentation.
    /// Falls back to [`Rendering::Whole`] when the change cannot be confined
    /// to whole lines.
    Spliced { source: &'a str, program: &'a SyntaxTree },
}

impl<'a> Rendering<'a> {
    pub fn spliced(source: &'a str, program: &'a SyntaxTree) -> Self {
        Rendering::Spliced { source, program }
    }

    /// Text of `modified` with the k-th hole in text order replaced by `fill(k)`.
    pub fn render(&self, modified: &SyntaxTree, mut fill: impl FnMut(usize) -> String) -> Result<String, UnparseError> {
        if let Rendering::Spliced { source, program } = *self {
            if let Some(text) = splice(source, program, modified, &mut fill)? {
                return Ok(text);
            }
        }
        unparse_with_holes(modified, fill)
    }

    /// Like [`Rendering::render`] for a program without masks left: the
    /// spliced text is kept only if it parses to the same tree as the
    /// whole rendering.
    pub fn render_filled(&self, modified: &SyntaxTree, fills: &[String]) -> Result<String, UnparseError> {
        let fill = |k: usize| fills.get(k).cloned().unwrap_or_default();
        let whole = unparse_with_holes(modified, fill)?;
        if let Rendering::Whole = self {
            return Ok(whole);
        }
        let spliced = self.render(modified, fill)?;
        match (parse_source(&spliced), parse_source(&whole)) {
            (Ok(a), Ok(b)) if a.structurally_eq(&b) => Ok(spliced),
            (Err(_), Err(_)) => Ok(spliced),
            _ => Ok(whole),
        }
    }
}

/// Changed run of statements: `old` in the original under `parent`, to be
/// replaced by `new` from the modified tree. `anchor` is the original
/// statement the run sits next to when `old` is empty.
struct Region {
    old: Vec<NodeId>,
    new: Vec<NodeId>,
    anchor: Option<(NodeId, bool)>,
}

fn statement_relation(r: &str) -> bool {
    STATEMENT_RELATIONS.contains(&r)
}

fn relations(t: &SyntaxTree, id: NodeId) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for c in &t.node(id).children {
        if !out.contains(&c.relation.as_str()) {
            out.push(&c.relation);
        }
    }
    out
}

fn find_region(a: &SyntaxTree, x: NodeId, b: &SyntaxTree, y: NodeId) -> Option<Region> {
    let (nx, ny) = (a.node(x), b.node(y));
    if nx.kind != ny.kind || nx.value != ny.value {
        return None;
    }
    let mut rels = relations(a, x);
    for r in relations(b, y) {
        if !rels.contains(&r) {
            rels.push(r);
        }
    }
    let mut changed = None;
    for r in rels {
        let (la, lb): (Vec<NodeId>, Vec<NodeId>) = (nx.children_in(r).collect(), ny.children_in(r).collect());
        let same = la.len() == lb.len() && la.iter().zip(&lb).all(|(&p, &q)| a.subtree_eq(p, b, q));
        if same {
            continue;
        }
        if !statement_relation(r) || changed.is_some() {
            return None;
        }
        changed = Some((la, lb));
    }
    let (la, lb) = changed?;
    let mut p = 0;
    while p < la.len().min(lb.len()) && a.subtree_eq(la[p], b, lb[p]) {
        p += 1;
    }
    let mut s = 0;
    while s < (la.len() - p).min(lb.len() - p) && a.subtree_eq(la[la.len() - 1 - s], b, lb[lb.len() - 1 - s]) {
        s += 1;
    }
    let (old, new) = (la[p..la.len() - s].to_vec(), lb[p..lb.len() - s].to_vec());
    if let ([u], [v]) = (old.as_slice(), new.as_slice()) {
        if let Some(inner) = find_region(a, *u, b, *v) {
            return Some(inner);
        }
    }
    let anchor = if !old.is_empty() {
        None
    } else if p > 0 {
        Some((la[p - 1], false))
    } else {
        la.get(p).map(|&n| (n, true))
    };
    if old.is_empty() && anchor.is_none() {
        return None;
    }
    Some(Region { old, new, anchor })
}

/// Lines spanned by a statement including everything nested in it.
fn line_range(t: &SyntaxTree, id: NodeId) -> (u32, u32) {
    let mut lo = t.node(id).span.start_line;
    let mut hi = t.node(id).span.end_line;
    for d in t.descendants(id) {
        lo = lo.min(t.node(d).span.start_line);
        hi = hi.max(t.node(d).span.end_line);
    }
    (lo, hi)
}

fn indentation(line: &str) -> &str {
    &line[..line.len() - line.trim_start().len()]
}

fn count_holes(t: &SyntaxTree) -> usize {
    t.nodes().filter(|(_, n)| n.is_hole() || n.value == NodeValue::Hole).count()
}

fn splice(
    source: &str,
    program: &SyntaxTree,
    modified: &SyntaxTree,
    fill: &mut dyn FnMut(usize) -> String,
) -> Result<Option<String>, UnparseError> {
    let Some(region) = find_region(program, program.root(), modified, modified.root()) else { return Ok(None) };
    let lines: Vec<&str> = source.split_inclusive('\n').collect();
    let line = |n: u32| lines.get(n as usize - 1).copied().unwrap_or("");
    // Lines [from, to) of the original are replaced.
    let (from, to, indent) = match (region.old.first(), region.old.last(), region.anchor) {
        (Some(&first), Some(&last), _) => {
            let (lo, _) = line_range(program, first);
            let (_, hi) = line_range(program, last);
            let indent = indentation(line(lo));
            if program.node(first).span.start_col as usize > indent.len() + 1 {
                return Ok(None);
            }
            (lo, hi + 1, indent)
        }
        (_, _, Some((n, before))) => {
            let (lo, hi) = line_range(program, n);
            let at = if before { lo } else { hi + 1 };
            (at, at, indentation(line(lo)))
        }
        _ => return Ok(None),
    };
    if from == 0 || to as usize > lines.len() + 1 {
        return Ok(None);
    }
    // No statement that stays may share a line with the rewritten ones.
    let touched: Vec<NodeId> = region.old.iter().copied().chain(region.anchor.map(|(a, _)| a)).collect();
    let (lo, hi) = match region.anchor {
        Some((a, _)) => line_range(program, a),
        None => (from, to - 1),
    };
    for (id, n) in program.nodes() {
        let related = touched.iter().any(|&t| t == id || program.is_ancestor(t, id) || program.is_ancestor(id, t));
        if n.is_statement() && !related && n.span.start_line <= hi && lo <= n.span.end_line {
            return Ok(None);
        }
    }
    let group = region.new.iter().fold(Fragment::new("Group", NodeValue::None), |g, &id| g.with_child("stmts", modified.to_fragment(id)));
    let part = SyntaxTree::from_fragment(&group);
    if count_holes(&part) != count_holes(modified) {
        return Ok(None);
    }
    let rendered = if region.new.is_empty() { String::new() } else { unparse_with_holes(&part, &mut *fill)? };
    let mut out = String::with_capacity(source.len() + rendered.len());
    for l in &lines[..from as usize - 1] {
        out.push_str(l);
    }
    for l in rendered.lines() {
        out.push_str(indent);
        out.push_str(l);
        out.push('\n');
    }
    for l in &lines[(to as usize - 1).min(lines.len())..] {
        out.push_str(l);
    }
    Ok(Some(out))
}
