use tyfix_core::matcher::EmptyMatch;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("no template matched the buggy statement")]
    NoTemplateMatched,
    #[error("{0}")]
    Environment(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NoTemplateMatched => 3,
            CliError::Environment(_) => 4,
        }
    }
}

impl From<EmptyMatch> for CliError {
    fn from(_: EmptyMatch) -> Self {
        CliError::NoTemplateMatched
    }
}

pub fn env_err(context: &str) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Environment(format!("{context}: {e}"))
}
