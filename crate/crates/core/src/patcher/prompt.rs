//! Rendering modified programs as masked prompts.

use serde::{Deserialize, Serialize};

use super::splice::Rendering;
use crate::syntax::{SyntaxTree, UnparseError};

/// Number of distinct mask tokens available, `<extra_id_0>` to `<extra_id_99>`.
pub const MAX_MASKS: usize = 100;

pub fn mask_token(k: usize) -> String {
    format!("<extra_id_{k}>")
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("{holes} holes exceed the {cap} available mask tokens")]
    TooManyMasks { holes: usize, cap: usize },
    #[error(transparent)]
    Unparse(#[from] UnparseError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodePrompt {
    /// Whole program with masks.
    pub text: String,
    /// The lines given to the filler: those within the context window of a
    /// masked line, or the whole text when no window is set.
    pub excerpt: String,
    pub mask_count: usize,
    pub template_id: String,
}

/// Renders `modified` with its holes replaced by numbered mask tokens in
/// text order. With `context_lines`, the excerpt keeps only lines at most
/// that far from a line holding a mask.
pub fn render_prompt(
    modified: &SyntaxTree,
    rendering: Rendering<'_>,
    template_id: &str,
    context_lines: Option<usize>,
    cap: usize,
) -> Result<CodePrompt, PromptError> {
    let mut count = 0;
    let text = rendering.render(modified, |k| {
        count = k + 1;
        mask_token(k)
    })?;
    if count > cap {
        return Err(PromptError::TooManyMasks { holes: count, cap });
    }
    let excerpt = match context_lines {
        Some(n) if count > 0 => {
            let lines: Vec<&str> = text.lines().collect();
            let masked: Vec<usize> = (0..lines.len()).filter(|&i| lines[i].contains("<extra_id_")).collect();
            let keep = |i: usize| masked.iter().any(|&m| i.abs_diff(m) <= n);
            let mut out: String = (0..lines.len()).filter(|&i| keep(i)).map(|i| format!("{}\n", lines[i])).collect();
            if !text.ends_with('\n') {
                out.pop();
            }
            out
        }
        _ => text.clone(),
    };
    Ok(CodePrompt { text, excerpt, mask_count: count, template_id: template_id.to_string() })
}

/// The program with every mask filled: the k-th hole gets `fills[k]`.
pub fn fill_holes(modified: &SyntaxTree, rendering: Rendering<'_>, fills: &[String]) -> Result<String, UnparseError> {
    rendering.render_filled(modified, fills)
}

/// Mask indices in order of first appearance in `text`.
pub fn mask_sequence(text: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(p) = rest.find("<extra_id_") {
        rest = &rest[p + "<extra_id_".len()..];
        let end = rest.find('>').unwrap_or(0);
        if let Ok(k) = rest[..end].parse() {
            out.push(k);
        }
    }
    out
}
