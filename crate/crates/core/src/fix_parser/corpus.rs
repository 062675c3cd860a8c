//! Reading fix corpora from disk.
//!
//! Each fix lives in its own directory holding `before.py` and either
//! `after.py` or a unified diff (`*.diff`). An optional `lines.json` of the
//! form `{"deleted": [[start, end], ...], "added": [[start, end], ...]}`
//! overrides the diff-derived line spans; such a fix is never split.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::diff::{apply_unified_diff, split_fix};
use super::{FixInstance, FixParseError};
use crate::syntax::SourceSpan;

/// One corpus directory and what it yielded.
#[derive(Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub path: PathBuf,
    pub result: Result<Vec<FixInstance>, FixParseError>,
}

#[derive(Deserialize)]
struct LinesFile {
    #[serde(default)]
    deleted: Vec<(u32, u32)>,
    #[serde(default)]
    added: Vec<(u32, u32)>,
}

fn read(path: &Path) -> Result<String, FixParseError> {
    fs::read_to_string(path).map_err(|source| FixParseError::Io { path: path.to_path_buf(), source })
}

fn spans(raw: &[(u32, u32)], path: &Path) -> Result<Vec<SourceSpan>, FixParseError> {
    raw.iter()
        .map(|&(a, b)| {
            if a == 0 || a > b {
                Err(FixParseError::Layout(format!("{}: bad line span [{a}, {b}]", path.display())))
            } else {
                Ok(SourceSpan::new(a, b))
            }
        })
        .collect()
}

/// Loads one fix directory.
pub fn load_fix(dir: &Path, limit: usize) -> Result<Vec<FixInstance>, FixParseError> {
    let id = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let buggy = read(&dir.join("before.py"))?;
    let after = dir.join("after.py");
    let fixed = if after.exists() {
        read(&after)?
    } else {
        let diff = diff_file(dir)?.ok_or_else(|| FixParseError::Layout(format!("{}: no after.py or diff", dir.display())))?;
        apply_unified_diff(&buggy, &read(&diff)?)?
    };
    let lines = dir.join("lines.json");
    if lines.exists() {
        let parsed: LinesFile = serde_json::from_str(&read(&lines)?)
            .map_err(|e| FixParseError::Layout(format!("{}: {e}", lines.display())))?;
        let inst = FixInstance {
            id,
            buggy_src: buggy,
            fixed_src: fixed,
            deleted_lines: spans(&parsed.deleted, &lines)?,
            added_lines: spans(&parsed.added, &lines)?,
        };
        if inst.modified_line_count() > limit {
            return Err(FixParseError::OversizeCommit { lines: inst.modified_line_count(), limit });
        }
        return Ok(vec![inst]);
    }
    split_fix(&id, &buggy, &fixed, limit)
}

fn diff_file(dir: &Path) -> Result<Option<PathBuf>, FixParseError> {
    let entries = fs::read_dir(dir).map_err(|source| FixParseError::Io { path: dir.to_path_buf(), source })?;
    let mut diffs: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "diff" || e == "patch"))
        .collect();
    diffs.sort();
    Ok(diffs.into_iter().next())
}

/// Loads every fix directory below `root`, in name order. Failures are
/// reported per entry.
pub fn load_corpus(root: &Path, limit: usize) -> Result<Vec<CorpusEntry>, FixParseError> {
    let entries = fs::read_dir(root).map_err(|source| FixParseError::Io { path: root.to_path_buf(), source })?;
    let mut dirs: Vec<PathBuf> = entries.filter_map(Result::ok).map(|e| e.path()).filter(|p| p.is_dir()).collect();
    dirs.sort();
    Ok(dirs
        .into_iter()
        .map(|path| CorpusEntry {
            id: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            result: load_fix(&path, limit),
            path,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) {
        fs::write(dir.join(name), text).unwrap();
    }

    #[test]
    fn loads_pairs_diffs_and_overrides() {
        let root = tempfile::tempdir().unwrap();
        let a = root.path().join("a");
        fs::create_dir(&a).unwrap();
        write(&a, "before.py", "x = 1\n");
        write(&a, "after.py", "x = str(1)\n");
        let b = root.path().join("b");
        fs::create_dir(&b).unwrap();
        write(&b, "before.py", "y = 1\n");
        write(&b, "fix.diff", &diffy::create_patch("y = 1\n", "y = int(1)\n").to_string());
        let c = root.path().join("c");
        fs::create_dir(&c).unwrap();
        write(&c, "before.py", "z = 1\n");
        write(&c, "fix.diff", "garbage\n@@ -9,9 +9,9 @@\n");
        let d = root.path().join("d");
        fs::create_dir(&d).unwrap();
        write(&d, "before.py", "w = 1\nv = 2\n");
        write(&d, "after.py", "w = 2\nv = 3\n");
        write(&d, "lines.json", r#"{"deleted": [[1, 2]], "added": [[1, 2]]}"#);

        let corpus = load_corpus(root.path(), 50).unwrap();
        let ids: Vec<&str> = corpus.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c", "d"]);
        assert_eq!(corpus[0].result.as_ref().unwrap()[0].fixed_src, "x = str(1)\n");
        assert_eq!(corpus[1].result.as_ref().unwrap()[0].fixed_src, "y = int(1)\n");
        assert!(corpus[2].result.is_err());
        let d = corpus[3].result.as_ref().unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].deleted_lines, vec![SourceSpan::new(1, 2)]);
    }
}
