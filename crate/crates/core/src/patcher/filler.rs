//! Mask fillers: anything that proposes text for the masks of a prompt.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::prompt::CodePrompt;

/// One proposal: a text per mask, in mask order, and a score (higher is better).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fill {
    pub fills: Vec<String>,
    pub score: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum FillError {
    #[error("filler request failed: {0}")]
    Transport(String),
    #[error("filler returned {got} fills for {expected} masks")]
    Arity { expected: usize, got: usize },
}

pub trait MaskFiller: Send + Sync {
    /// At most `beam` proposals, each with exactly `prompt.mask_count` fills.
    fn fill(&self, prompt: &CodePrompt, beam: usize) -> Result<Vec<Fill>, FillError>;
}

/// Checks and trims a filler's answer.
pub fn checked(prompt: &CodePrompt, beam: usize, results: Vec<Fill>) -> Result<Vec<Fill>, FillError> {
    if let Some(bad) = results.iter().find(|r| r.fills.len() != prompt.mask_count) {
        return Err(FillError::Arity { expected: prompt.mask_count, got: bad.fills.len() });
    }
    Ok(results.into_iter().take(beam).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MockRule {
    /// Applies when the prompt excerpt contains this text.
    pub contains: String,
    pub results: Vec<Fill>,
}

/// Deterministic filler for tests and offline runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MockFiller {
    /// First rule whose needle occurs in the prompt wins; otherwise nothing.
    Table { rules: Vec<MockRule> },
    /// One proposal filling mask k with `__mask_k`.
    Echo,
    /// Wraps another mock and adds, after each of its proposals, a copy
    /// whose fills are syntactically broken.
    Corrupt { inner: Box<MockFiller> },
}

pub const CORRUPT_FILL: &str = ")(:";

impl MockFiller {
    pub fn table(rules: Vec<MockRule>) -> Self {
        MockFiller::Table { rules }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn propose(&self, prompt: &CodePrompt) -> Vec<Fill> {
        match self {
            MockFiller::Table { rules } => rules
                .iter()
                .find(|r| prompt.excerpt.contains(&r.contains))
                .map(|r| r.results.clone())
                .unwrap_or_default(),
            MockFiller::Echo => {
                vec![Fill { fills: (0..prompt.mask_count).map(|k| format!("__mask_{k}")).collect(), score: 0.0 }]
            }
            MockFiller::Corrupt { inner } => inner
                .propose(prompt)
                .into_iter()
                .flat_map(|f| {
                    let broken = Fill { fills: vec![CORRUPT_FILL.to_string(); f.fills.len()], score: f.score - 1.0 };
                    [f, broken]
                })
                .collect(),
        }
    }
}

impl MaskFiller for MockFiller {
    fn fill(&self, prompt: &CodePrompt, beam: usize) -> Result<Vec<Fill>, FillError> {
        checked(prompt, beam, self.propose(prompt))
    }
}

#[derive(Serialize)]
struct Request<'a> {
    prompt: &'a str,
    mask_count: usize,
    beam: usize,
}

#[derive(Deserialize)]
struct Response {
    results: Vec<Fill>,
}

/// Filler behind an HTTP endpoint taking `{prompt, mask_count, beam}` and
/// answering `{results: [{fills, score}]}`.
pub struct HttpFiller {
    url: String,
    agent: ureq::Agent,
}

impl HttpFiller {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        HttpFiller { url: url.into(), agent: ureq::AgentBuilder::new().timeout(timeout).build() }
    }
}

impl MaskFiller for HttpFiller {
    fn fill(&self, prompt: &CodePrompt, beam: usize) -> Result<Vec<Fill>, FillError> {
        let req = Request { prompt: &prompt.excerpt, mask_count: prompt.mask_count, beam };
        let resp: Response = self
            .agent
            .post(&self.url)
            .send_json(&req)
            .map_err(|e| FillError::Transport(e.to_string()))?
            .into_json()
            .map_err(|e| FillError::Transport(e.to_string()))?;
        checked(prompt, beam, resp.results)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prompt(excerpt: &str, masks: usize) -> CodePrompt {
        CodePrompt { text: excerpt.into(), excerpt: excerpt.into(), mask_count: masks, template_id: "t".into() }
    }

    #[test]
    fn table_echo_and_corrupt() {
        let json = r#"{"mode": "table", "rules": [{"contains": "user_pass", "results": [{"fills": ["to_bytes"], "score": 1.0}, {"fills": ["str"], "score": 0.5}]}]}"#;
        let table = MockFiller::from_json(json).unwrap();
        let p = prompt("user_pass = <extra_id_0>(x)", 1);
        assert_eq!(table.fill(&p, 50).unwrap()[0].fills, ["to_bytes"]);
        assert_eq!(table.fill(&p, 1).unwrap().len(), 1);
        assert!(table.fill(&prompt("other", 1), 5).unwrap().is_empty());
        assert!(matches!(table.fill(&prompt("user_pass", 2), 5), Err(FillError::Arity { expected: 2, got: 1 })));
        assert_eq!(MockFiller::Echo.fill(&prompt("", 2), 5).unwrap()[0].fills, ["__mask_0", "__mask_1"]);
        let corrupt = MockFiller::Corrupt { inner: Box::new(table) };
        let out = corrupt.fill(&p, 50).unwrap();
        assert_eq!(out.len(), 4);
        assert_eq!(out[1].fills, [CORRUPT_FILL]);
    }

    #[test]
    fn unreachable_server_is_a_transport_error() {
        let f = HttpFiller::new("http://127.0.0.1:9/fill", Duration::from_millis(300));
        assert!(matches!(f.fill(&prompt("x", 0), 1), Err(FillError::Transport(_))));
    }
}
