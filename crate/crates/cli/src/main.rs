mod commands;
mod config;
mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use config::FileConfig;
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "tyfix", version, about = "Mine fix templates for Python type errors and use them to repair programs")]
struct Cli {
    /// TOML file with default settings.
    #[arg(long, global = true, env = "TYFIX_CONFIG")]
    config: Option<PathBuf>,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, global = true, env = "TYFIX_JOBS")]
    jobs: Option<usize>,
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mine a template forest from a fix corpus.
    Mine(MineArgs),
    /// Generate and validate candidate patches for a buggy file.
    Repair(RepairArgs),
    /// Measure how many fixes of a corpus a forest expresses.
    Coverage(CoverageArgs),
}

#[derive(clap::Args, Debug)]
pub struct MineArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the mining report; defaults to `<out>.report.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Drop trees whose root covers fewer fixes.
    #[arg(long, env = "TYFIX_MIN_FREQ")]
    pub min_freq: Option<usize>,
    /// Comma-separated subset of Add,Remove,Insert,Replace.
    #[arg(long, env = "TYFIX_CATEGORIES")]
    pub categories: Option<String>,
}

#[derive(clap::Args, Debug)]
pub struct RepairArgs {
    #[arg(long)]
    pub forest: PathBuf,
    #[arg(long)]
    pub file: PathBuf,
    /// Buggy line range `A:B` or single line `A`, 1-based.
    #[arg(long, value_parser = parse_lines)]
    pub lines: (u32, u32),
    /// `mock` (echo), `mock:RULES.json` (table) or an http(s) URL.
    #[arg(long, env = "TYFIX_FILLER")]
    pub filler: Option<String>,
    #[arg(long, env = "TYFIX_BEAM")]
    pub beam: Option<usize>,
    /// Shell command run from the root of each patched project copy.
    #[arg(long, env = "TYFIX_TEST_CMD")]
    pub test_cmd: Option<String>,
    /// Project containing the file; defaults to the file's directory.
    #[arg(long)]
    pub project: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = "TYFIX_TIMEOUT_SECS")]
    pub timeout_secs: Option<u64>,
    #[arg(long, env = "TYFIX_MAX_TEMPLATES")]
    pub max_templates: Option<usize>,
    /// Lines of context around masks given to the filler.
    #[arg(long, env = "TYFIX_CONTEXT_LINES")]
    pub context_lines: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Holdout {
    LeaveOneOut,
    None,
}

#[derive(clap::Args, Debug)]
pub struct CoverageArgs {
    /// Forest to measure; not used with leave-one-out, which mines its own.
    #[arg(long)]
    pub forest: Option<PathBuf>,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, env = "TYFIX_HOLDOUT")]
    pub holdout: Option<Holdout>,
    /// Pruning threshold for leave-one-out mining.
    #[arg(long, env = "TYFIX_MIN_FREQ")]
    pub min_freq: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_lines(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(':').unwrap_or((s, s));
    let a: u32 = a.trim().parse().map_err(|_| format!("bad line number {a:?}"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad line number {b:?}"))?;
    if a == 0 || a > b {
        return Err(format!("bad line range {s:?}"));
    }
    Ok((a, b))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    if let Some(jobs) = cli.jobs.or(file.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Environment(e.to_string()))?;
    }
    match cli.command {
        Command::Mine(args) => commands::mine(&args, &file),
        Command::Repair(args) => commands::repair(&args, &file),
        Command::Coverage(args) => commands::coverage(&args, &file),
    }
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_ranges() {
        assert_eq!(parse_lines("3:5"), Ok((3, 5)));
        assert_eq!(parse_lines("7"), Ok((7, 7)));
        assert!(parse_lines("5:3").is_err());
        assert!(parse_lines("0").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
