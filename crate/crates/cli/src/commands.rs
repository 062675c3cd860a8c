use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use tyfix_core::fix_parser::{load_corpus, parse_fix, FixInstance, DEFAULT_LINE_LIMIT, DEFAULT_WINDOW};
use tyfix_core::matcher::{bfs_select, leave_one_out_coverage, rank, template_coverage, BuggyProgramView};
use tyfix_core::miner::{mine_corpus, MiningReport};
use tyfix_core::patcher::{
    generate_patches, validate_candidates, CandidatePatch, GenerateOptions, HttpFiller, MaskFiller, MockFiller, PatchStatus, Rendering,
    TestOutcome, ValidationOptions,
};
use tyfix_core::syntax::{parse_source, SourceSpan};
use tyfix_core::template::{deserialize_forest, serialize_forest, BaseTypeTable, Category, ClusteringTree};

use crate::config::{pick, FileConfig, DEFAULT_BEAM, DEFAULT_MAX_TEMPLATES, DEFAULT_MIN_FREQ, DEFAULT_TIMEOUT_SECS};
use crate::error::{env_err, CliError};
use crate::{CoverageArgs, Holdout, MineArgs, RepairArgs};

#[derive(Serialize)]
struct Skipped {
    id: String,
    error: String,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize") + "\n";
    write_text(path, &text)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(env_err(&dir.display().to_string()))?;
    }
    fs::write(path, text).map_err(env_err(&path.display().to_string()))
}

fn load_instances(root: &Path) -> Result<(Vec<FixInstance>, Vec<Skipped>), CliError> {
    let entries = load_corpus(root, DEFAULT_LINE_LIMIT).map_err(|e| CliError::Usage(format!("corpus {}: {e}", root.display())))?;
    let mut fixes = Vec::new();
    let mut skipped = Vec::new();
    for entry in entries {
        match entry.result {
            Ok(insts) => fixes.extend(insts),
            Err(e) => {
                log::warn!("skipping {}: {e}", entry.id);
                skipped.push(Skipped { id: entry.id, error: e.to_string() });
            }
        }
    }
    Ok((fixes, skipped))
}

fn read_forest(path: &Path) -> Result<Vec<ClusteringTree>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("forest {}: {e}", path.display())))?;
    deserialize_forest(&text).map_err(|e| CliError::Usage(format!("forest {}: {e}", path.display())))
}

fn parse_categories(list: Option<String>) -> Result<BTreeSet<Category>, CliError> {
    let Some(list) = list else { return Ok(Category::ALL.into_iter().collect()) };
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<Category>().map_err(|_| CliError::Usage(format!("unknown category {s:?}"))))
        .collect()
}

#[derive(Serialize)]
struct MineOutput {
    fixes: usize,
    skipped: Vec<Skipped>,
    mining: MiningReport,
}

pub fn mine(args: &MineArgs, file: &FileConfig) -> Result<(), CliError> {
    let min_freq = pick(args.min_freq, file.min_freq, DEFAULT_MIN_FREQ);
    let categories = parse_categories(args.categories.clone().or(file.categories.clone()))?;
    let (fixes, mut skipped) = load_instances(&args.corpus)?;
    let parsed: Vec<_> = fixes.par_iter().map(|f| (f.id.clone(), parse_fix(f))).collect();
    let mut templates = Vec::new();
    for (id, result) in parsed {
        match result {
            Ok(t) if categories.contains(&t.category) => templates.push(t),
            Ok(_) => {}
            Err(e) => {
                log::warn!("skipping {id}: {e}");
                skipped.push(Skipped { id, error: e.to_string() });
            }
        }
    }
    if templates.is_empty() {
        log::warn!("no templates to mine in {}", args.corpus.display());
    }
    let start = Instant::now();
    let (forest, mining) = mine_corpus(templates, min_freq);
    log::info!("mined in {} ms", start.elapsed().as_millis());
    write_text(&args.out, &(serialize_forest(&forest) + "\n"))?;
    let report_path = args.report.clone().unwrap_or_else(|| with_suffix(&args.out, ".report.json"));
    let output = MineOutput { fixes: fixes.len(), skipped, mining };
    write_json(&report_path, &output)?;
    for c in &output.mining.categories {
        println!(
            "{}: {} instances, {} trees, {} kept ({} instances)",
            c.category.as_str(),
            c.instances,
            c.trees,
            c.kept_trees,
            c.kept_instances
        );
    }
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn build_filler(spec: &str, timeout: Duration) -> Result<Box<dyn MaskFiller>, CliError> {
    if spec == "mock" {
        return Ok(Box::new(MockFiller::Echo));
    }
    if let Some(path) = spec.strip_prefix("mock:") {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("filler rules {path}: {e}")))?;
        let filler = MockFiller::from_json(&text).map_err(|e| CliError::Usage(format!("filler rules {path}: {e}")))?;
        return Ok(Box::new(filler));
    }
    if spec.starts_with("http://") || spec.starts_with("https://") {
        return Ok(Box::new(HttpFiller::new(spec, timeout)));
    }
    Err(CliError::Usage(format!("filler must be mock, mock:FILE or a URL, not {spec:?}")))
}

#[derive(Serialize)]
struct ManifestRow<'a> {
    candidate_id: &'a str,
    template_id: &'a str,
    status: PatchStatus,
    score: f64,
    #[serde(flatten)]
    outcome: &'a TestOutcome,
}

#[derive(Serialize)]
struct RepairSummary<'a> {
    matched_templates: usize,
    candidates: usize,
    syntax_ok: usize,
    plausible: Vec<&'a str>,
    errors: Vec<String>,
}

pub fn repair(args: &RepairArgs, file: &FileConfig) -> Result<(), CliError> {
    let beam = pick(args.beam, file.beam, DEFAULT_BEAM);
    let timeout = Duration::from_secs(pick(args.timeout_secs, file.timeout_secs, DEFAULT_TIMEOUT_SECS));
    let filler_spec = pick(args.filler.clone(), file.filler.clone(), "mock".to_string());
    let test_cmd = args.test_cmd.clone().or(file.test_cmd.clone());
    let opts = GenerateOptions {
        beam,
        max_templates: pick(args.max_templates, file.max_templates, DEFAULT_MAX_TEMPLATES),
        context_lines: args.context_lines.or(file.context_lines),
    };

    let forest = read_forest(&args.forest)?;
    let source = fs::read_to_string(&args.file).map_err(|e| CliError::Usage(format!("{}: {e}", args.file.display())))?;
    let program = parse_source(&source).map_err(|e| CliError::Usage(format!("{}: {e}", args.file.display())))?;
    let (a, b) = args.lines;
    if b > program.line_count() {
        return Err(CliError::Usage(format!("lines {a}:{b} outside {} ({} lines)", args.file.display(), program.line_count())));
    }
    let view = BuggyProgramView::from_lines(&program, &[SourceSpan::new(a, b)], DEFAULT_WINDOW, BaseTypeTable::builtin())
        .map_err(|_| CliError::Usage(format!("no statement on lines {a}:{b}")))?;
    let filler = build_filler(&filler_spec, timeout)?;

    let ranked = rank(bfs_select(&forest, &view))?;
    let matched = ranked.iter().count();
    let mut gen = generate_patches(&view, &program, Rendering::spliced(&source, &program), &ranked, filler.as_ref(), &opts);
    let errors: Vec<String> = gen.errors.iter().map(|(id, e)| format!("{id}: {e}")).collect();
    for e in &errors {
        log::warn!("{e}");
    }
    write_json(&args.out.join("prompts.json"), &gen.prompts)?;

    let outcomes: Vec<TestOutcome> = match &test_cmd {
        Some(cmd) => {
            let project = match &args.project {
                Some(p) => p.clone(),
                None => args.file.parent().filter(|p| !p.as_os_str().is_empty()).map_or_else(|| PathBuf::from("."), Path::to_path_buf),
            };
            let project = project.canonicalize().map_err(env_err(&project.display().to_string()))?;
            let file = args.file.canonicalize().map_err(env_err(&args.file.display().to_string()))?;
            let target = file
                .strip_prefix(&project)
                .map_err(|_| CliError::Usage(format!("{} is not inside {}", file.display(), project.display())))?
                .to_path_buf();
            let scratch = tempfile::Builder::new().prefix("tyfix-").tempdir().map_err(env_err("scratch directory"))?;
            let mut vopts = ValidationOptions::new(project, target, cmd.clone(), scratch.path());
            vopts.timeout = timeout;
            let report = validate_candidates(&mut gen.candidates, &vopts).map_err(|e| CliError::Environment(e.to_string()))?;
            report.entries.into_iter().map(|e| e.outcome).collect()
        }
        None => vec![TestOutcome::Skipped; gen.candidates.len()],
    };

    write_json(&args.out.join("candidates.json"), &gen.candidates)?;
    let patches = args.out.join("patches");
    for c in gen.candidates.iter().filter(|c| c.status >= PatchStatus::SyntaxOk) {
        let diff = diffy::create_patch(&source, &c.text).to_string();
        write_text(&patches.join(format!("{}.diff", c.id)), &diff)?;
    }
    let rows: Vec<ManifestRow> = gen
        .candidates
        .iter()
        .zip(&outcomes)
        .map(|(c, o)| ManifestRow { candidate_id: &c.id, template_id: &c.template_id, status: c.status, score: c.score, outcome: o })
        .collect();
    write_json(&args.out.join("manifest.json"), &rows)?;

    let summary = RepairSummary {
        matched_templates: matched,
        candidates: gen.candidates.len(),
        syntax_ok: gen.syntax_ok().count(),
        plausible: gen.candidates.iter().filter(|c| c.status == PatchStatus::Plausible).map(|c: &CandidatePatch| c.id.as_str()).collect(),
        errors,
    };
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(())
}

pub fn coverage(args: &CoverageArgs, file: &FileConfig) -> Result<(), CliError> {
    let holdout = match (args.holdout, file.holdout.as_deref()) {
        (Some(h), _) => h,
        (None, Some("leave-one-out")) => Holdout::LeaveOneOut,
        (None, Some("none")) | (None, None) => Holdout::None,
        (None, Some(other)) => return Err(CliError::Usage(format!("unknown holdout {other:?}"))),
    };
    let (fixes, _) = load_instances(&args.corpus)?;
    let report = match holdout {
        Holdout::None => {
            let path = args.forest.as_ref().ok_or_else(|| CliError::Usage("--forest is required without a holdout".into()))?;
            template_coverage(&read_forest(path)?, &fixes)
        }
        Holdout::LeaveOneOut => leave_one_out_coverage(&fixes, pick(args.min_freq, file.min_freq, DEFAULT_MIN_FREQ)),
    };
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}
