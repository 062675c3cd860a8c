//! Running a project's tests against candidate patches in scratch copies.

use std::fs;
use std::io;
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use super::generate::{CandidatePatch, PatchStatus};

#[derive(Debug, thiserror::Error)]
pub enum SandboxError {
    #[error("work directory {0} lies inside the project")]
    WorkdirInsideProject(PathBuf),
    #[error("target {0} is not a file of the project")]
    MissingTarget(PathBuf),
    #[error("project tree changed during validation")]
    ProjectModified,
    #[error("io error at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> SandboxError + '_ {
    move |source| SandboxError::Io { path: path.to_path_buf(), source }
}

#[derive(Clone, Debug)]
pub struct ValidationOptions {
    pub project: PathBuf,
    /// Patched file, relative to the project root.
    pub target: PathBuf,
    /// Run with `sh -c` from the root of each copy.
    pub command: String,
    pub workdir: PathBuf,
    pub timeout: Duration,
    pub stop_at_first: bool,
}

impl ValidationOptions {
    pub fn new(project: impl Into<PathBuf>, target: impl Into<PathBuf>, command: impl Into<String>, workdir: impl Into<PathBuf>) -> Self {
        ValidationOptions {
            project: project.into(),
            target: target.into(),
            command: command.into(),
            workdir: workdir.into(),
            timeout: Duration::from_secs(300),
            stop_at_first: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TestOutcome {
    Pass,
    Fail { code: Option<i32> },
    Timeout,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub candidate_id: String,
    pub template_id: String,
    pub status: PatchStatus,
    pub score: f64,
    #[serde(flatten)]
    pub outcome: TestOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub project_checksum: String,
    pub entries: Vec<ManifestEntry>,
}

impl ValidationReport {
    pub fn plausible(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.outcome == TestOutcome::Pass)
    }
}

/// SHA-256 over the relative paths and contents of every file below `root`,
/// in path order.
pub fn tree_checksum(root: &Path) -> Result<String, SandboxError> {
    let mut hasher = Sha256::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| SandboxError::Io { path: root.to_path_buf(), source: e.into() })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        hasher.update(rel.to_string_lossy().as_bytes());
        hasher.update([0]);
        let bytes = fs::read(entry.path()).map_err(io_at(entry.path()))?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

/// Canonical form of a path that may not exist yet.
fn resolved(path: &Path) -> Result<PathBuf, SandboxError> {
    let abs = if path.is_absolute() { path.to_path_buf() } else { std::env::current_dir().map_err(io_at(path))?.join(path) };
    let mut existing = abs.as_path();
    let mut rest = Vec::new();
    while !existing.exists() {
        rest.push(existing.file_name().unwrap_or_default().to_owned());
        existing = existing.parent().unwrap_or(Path::new("/"));
    }
    let mut out = existing.canonicalize().map_err(io_at(existing))?;
    out.extend(rest.iter().rev());
    Ok(out)
}

fn copy_tree(from: &Path, to: &Path) -> Result<(), SandboxError> {
    for entry in WalkDir::new(from) {
        let entry = entry.map_err(|e| SandboxError::Io { path: from.to_path_buf(), source: e.into() })?;
        let rel = entry.path().strip_prefix(from).unwrap_or(entry.path());
        let dest = to.join(rel);
        if entry.file_type().is_dir() {
            fs::create_dir_all(&dest).map_err(io_at(&dest))?;
        } else if entry.file_type().is_file() {
            fs::copy(entry.path(), &dest).map_err(io_at(&dest))?;
        }
    }
    Ok(())
}

/// Runs `command` in `dir` in its own process group, killing the whole
/// group when `timeout` runs out.
fn run_tests(command: &str, dir: &Path, timeout: Duration) -> Result<TestOutcome, SandboxError> {
    let log = dir.join(".tyfix-test.log");
    let out = fs::File::create(&log).map_err(io_at(&log))?;
    let err = out.try_clone().map_err(io_at(&log))?;
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .current_dir(dir)
        .stdin(Stdio::null())
        .stdout(out)
        .stderr(err)
        .process_group(0)
        .spawn()
        .map_err(io_at(dir))?;
    let start = Instant::now();
    loop {
        if let Some(status) = child.try_wait().map_err(io_at(dir))? {
            return Ok(if status.success() { TestOutcome::Pass } else { TestOutcome::Fail { code: status.code() } });
        }
        if start.elapsed() >= timeout {
            // SAFETY: kill(2) on the group we created; no memory is involved.
            unsafe {
                libc::kill(-(child.id() as i32), libc::SIGKILL);
            }
            let _ = child.wait();
            return Ok(TestOutcome::Timeout);
        }
        std::thread::sleep(Duration::from_millis(10));
    }
}

/// Tests each parsable candidate in `<workdir>/<candidate-id>/`, a fresh
/// copy of the project with the target file replaced. Writes a unified diff
/// per candidate and `manifest.json` to the work directory and marks passing
/// candidates plausible. The project itself is only read.
pub fn validate_candidates(candidates: &mut [CandidatePatch], opts: &ValidationOptions) -> Result<ValidationReport, SandboxError> {
    let project = opts.project.canonicalize().map_err(io_at(&opts.project))?;
    let workdir = resolved(&opts.workdir)?;
    if workdir.starts_with(&project) {
        return Err(SandboxError::WorkdirInsideProject(workdir));
    }
    fs::create_dir_all(&workdir).map_err(io_at(&workdir))?;
    let target = project.join(&opts.target);
    if !target.is_file() {
        return Err(SandboxError::MissingTarget(opts.target.clone()));
    }
    let original = fs::read_to_string(&target).map_err(io_at(&target))?;
    let checksum = tree_checksum(&project)?;

    let mut entries = Vec::new();
    let mut done = false;
    for cand in candidates.iter_mut() {
        let outcome = if done || cand.status < PatchStatus::SyntaxOk {
            TestOutcome::Skipped
        } else {
            let scratch = workdir.join(&cand.id);
            if scratch.exists() {
                fs::remove_dir_all(&scratch).map_err(io_at(&scratch))?;
            }
            copy_tree(&project, &scratch)?;
            let file = scratch.join(&opts.target);
            fs::write(&file, &cand.text).map_err(io_at(&file))?;
            let diff_path = workdir.join(format!("{}.diff", cand.id));
            let diff = diffy::create_patch(&original, &cand.text).to_string();
            fs::write(&diff_path, diff).map_err(io_at(&diff_path))?;
            run_tests(&opts.command, &scratch, opts.timeout)?
        };
        if outcome == TestOutcome::Pass {
            cand.status = PatchStatus::Plausible;
            done = opts.stop_at_first;
        }
        entries.push(ManifestEntry {
            candidate_id: cand.id.clone(),
            template_id: cand.template_id.clone(),
            status: cand.status,
            score: cand.score,
            outcome,
        });
    }
    if tree_checksum(&project)? != checksum {
        return Err(SandboxError::ProjectModified);
    }
    let report = ValidationReport { project_checksum: checksum, entries };
    let manifest = workdir.join("manifest.json");
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(&manifest, json).map_err(io_at(&manifest))?;
    Ok(report)
}
