//! Helpers for driving the `lmcritic` binary.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_lmcritic");

pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

/// Runs and asserts success, returning stdout.
pub fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// A small desk LM (`lm.lmc`) and unlabeled file (`unlabeled.jsonl`) in `dir`.
pub fn desk_setup(dir: &Path, unlabeled: usize) {
    ok(
        dir,
        &[
            "--seed",
            "3",
            "desk",
            "clean",
            "--n",
            "3000",
            "--out",
            "train.jsonl",
        ],
    );
    ok(
        dir,
        &["lm", "train", "--corpus", "train.jsonl", "--out", "lm.lmc"],
    );
    let n = unlabeled.to_string();
    ok(
        dir,
        &[
            "--seed",
            "3",
            "desk",
            "unlabeled",
            "--n",
            &n,
            "--offset",
            "3000",
            "--out",
            "unlabeled.jsonl",
        ],
    );
}

/// Relative path -> bytes for every file under `dir`.
pub fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(
                    path.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&path).unwrap(),
                );
            }
        }
    }
    out
}
