//! From ranked templates to candidate patches.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::apply::{apply_template, ApplyError};
use super::filler::{Fill, FillError, MaskFiller};
use super::splice::Rendering;
use super::prompt::{fill_holes, render_prompt, CodePrompt, PromptError, MAX_MASKS};
use crate::matcher::{BuggyProgramView, RankedTemplates};
use crate::syntax::{parse_source, SyntaxTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchStatus {
    /// Produced but not valid Python.
    Generated,
    /// Parses.
    SyntaxOk,
    /// Passed the project's tests.
    Plausible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidatePatch {
    pub id: String,
    pub template_id: String,
    /// Full patched program.
    pub text: String,
    pub fills: Vec<String>,
    pub score: f64,
    pub status: PatchStatus,
}

#[derive(Clone, Debug)]
pub struct GenerateOptions {
    pub beam: usize,
    pub max_templates: usize,
    pub context_lines: Option<usize>,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions { beam: 50, max_templates: 20, context_lines: None }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error(transparent)]
    Apply(#[from] ApplyError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Fill(#[from] FillError),
}

#[derive(Debug, Default)]
pub struct Generation {
    /// In template rank order, then by descending score within a prompt.
    pub candidates: Vec<CandidatePatch>,
    pub prompts: Vec<CodePrompt>,
    /// Templates that produced nothing, with the reason.
    pub errors: Vec<(String, GenerateError)>,
}

impl Generation {
    pub fn syntax_ok(&self) -> impl Iterator<Item = &CandidatePatch> {
        self.candidates.iter().filter(|c| c.status >= PatchStatus::SyntaxOk)
    }
}

/// Applies the top templates, asks `filler` for the masks of each result
/// and keeps every distinct program text that differs from the input.
pub fn generate_patches(
    view: &BuggyProgramView,
    program: &SyntaxTree,
    rendering: Rendering<'_>,
    ranked: &RankedTemplates,
    filler: &dyn MaskFiller,
    opts: &GenerateOptions,
) -> Generation {
    let mut out = Generation::default();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    if let Ok(original) = rendering.render(program, |_| String::new()) {
        seen.insert(original);
    }
    for tpl in ranked.iter().take(opts.max_templates) {
        let applications = match apply_template(view, program, tpl) {
            Ok(a) => a,
            Err(e) => {
                out.errors.push((tpl.id.clone(), e.into()));
                continue;
            }
        };
        for app in applications {
            let prompt = match render_prompt(&app.tree, rendering, &tpl.id, opts.context_lines, MAX_MASKS) {
                Ok(p) => p,
                Err(e) => {
                    out.errors.push((tpl.id.clone(), e.into()));
                    continue;
                }
            };
            let fills = if prompt.mask_count == 0 {
                vec![Fill { fills: Vec::new(), score: 0.0 }]
            } else {
                match filler.fill(&prompt, opts.beam) {
                    Ok(f) => f,
                    Err(e) => {
                        out.errors.push((tpl.id.clone(), e.into()));
                        out.prompts.push(prompt);
                        continue;
                    }
                }
            };
            let mut batch = Vec::new();
            for fill in fills {
                let Ok(text) = fill_holes(&app.tree, rendering, &fill.fills) else { continue };
                if !seen.insert(text.clone()) {
                    continue;
                }
                let status = if parse_source(&text).is_ok() { PatchStatus::SyntaxOk } else { PatchStatus::Generated };
                batch.push(CandidatePatch {
                    id: String::new(),
                    template_id: tpl.id.clone(),
                    text,
                    fills: fill.fills,
                    score: fill.score,
                    status,
                });
            }
            batch.sort_by(|a, b| b.score.total_cmp(&a.score));
            out.candidates.extend(batch);
            out.prompts.push(prompt);
        }
    }
    for (i, c) in out.candidates.iter_mut().enumerate() {
        c.id = format!("p{i:04}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fix_parser::FixInstance;
    use crate::matcher::rank;
    use crate::miner::mine;
    use crate::patcher::filler::{MockFiller, MockRule, CORRUPT_FILL};

    const BUGGY: &str = "def auth(user, password):\n    user_pass = '%s:%s' % (unquote(user), unquote(password))\n    return user_pass\n";

    fn wraps() -> Vec<crate::template::FixTemplate> {
        let fixes = [
            ("a", "def f(a, b):\n    s = '%s' % (quote(a), quote(b))\n    return s\n", "def f(a, b):\n    s = to_bytes('%s' % (quote(a), quote(b)))\n    return s\n"),
            ("b", "def g(c, d):\n    t = '%d' % (escape(c), escape(d))\n    return t\n", "def g(c, d):\n    t = to_native('%d' % (escape(c), escape(d)))\n    return t\n"),
        ];
        let templates: Vec<_> = fixes
            .iter()
            .map(|(id, b, f)| crate::fix_parser::analyze_fix(&FixInstance::from_sources(*id, *b, *f), crate::template::BaseTypeTable::builtin(), 3).unwrap().template)
            .collect();
        let forest = mine(templates);
        let view = BuggyProgramView::from_lines(&parse_source(BUGGY).unwrap(), &[crate::syntax::SourceSpan::line(2)], 3, crate::template::BaseTypeTable::builtin()).unwrap();
        crate::matcher::bfs_select(&forest, &view)
    }

    #[test]
    fn mocked_wrap_repair() {
        let program = parse_source(BUGGY).unwrap();
        let view = BuggyProgramView::from_lines(&program, &[crate::syntax::SourceSpan::line(2)], 3, crate::template::BaseTypeTable::builtin()).unwrap();
        let matched = wraps();
        assert!(!matched.is_empty());
        let ranked = rank(matched).unwrap();
        let rule = MockRule { contains: "user_pass".into(), results: vec![Fill { fills: vec!["to_bytes".into()], score: 1.0 }] };
        let filler = MockFiller::Corrupt { inner: Box::new(MockFiller::table(vec![rule])) };
        let gen = generate_patches(&view, &program, Rendering::spliced(BUGGY, &program), &ranked, &filler, &GenerateOptions::default());
        assert!(gen.errors.is_empty(), "{:?}", gen.errors);
        let best = gen.syntax_ok().next().expect("a parsable candidate");
        assert_eq!(best.text, BUGGY.replace("= '%s:%s' % (unquote(user), unquote(password))", "= to_bytes('%s:%s' % (unquote(user), unquote(password)))"));
        assert!(gen.candidates.iter().any(|c| c.status == PatchStatus::Generated && c.fills == [CORRUPT_FILL]));
        let texts: BTreeSet<_> = gen.candidates.iter().map(|c| &c.text).collect();
        assert_eq!(texts.len(), gen.candidates.len());
    }
}
