//! Running the `weave` binary over the golden corpus.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn golden(name: &str) -> String {
    golden_dir().join(name).to_string_lossy().into_owned()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs `weave args...` in `cwd`, with `WEAVE_THREADS` set when given.
pub fn weave_in(cwd: &Path, args: &[String], threads: Option<usize>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_weave"));
    cmd.args(args).current_dir(cwd);
    match threads {
        Some(n) => cmd.env("WEAVE_THREADS", n.to_string()),
        None => cmd.env_remove("WEAVE_THREADS"),
    };
    let out = cmd.output().expect("run weave");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub fn weave(args: &[&str]) -> Run {
    let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    weave_in(&std::env::temp_dir(), &args, None)
}

/// Every command of the golden corpus: a name and its arguments. Inputs are
/// absolute paths into the golden directory; outputs go under `out/`
/// relative to the working directory.
pub fn corpus() -> Vec<(String, Vec<String>)> {
    let g = golden;
    let mut out: Vec<(String, Vec<String>)> = Vec::new();
    let mut add = |name: &str, args: Vec<String>| out.push((name.to_string(), args));
    let s = |x: &str| x.to_string();

    for spec in ["twill", "basket", "plain", "satin", "all_over", "kagome", "kagome_mixed", "bad"] {
        add(&format!("solve_{spec}"), vec![s("solve"), g(&format!("{spec}.spec"))]);
    }
    add("solve_twill_next1", vec![s("solve"), g("twill.spec"), s("--next"), s("1")]);
    add("solve_twill_next3", vec![s("solve"), g("twill.spec"), s("--next"), s("3")]);
    add(
        "solve_twill_tight",
        vec![s("solve"), g("twill.spec"), s("--max-slope"), s("1"), s("--max-copies"), s("1"), s("--max-multiplier"), s("1")],
    );

    add("matrix_gen_diagonal", vec![s("matrix"), s("gen"), s("diagonal"), s("--p"), s("3"), s("--q"), s("2"), s("--direction"), s("-1")]);
    add("matrix_gen_block", vec![s("matrix"), s("gen"), s("block"), s("--p"), s("3")]);
    add("matrix_gen_satin", vec![s("matrix"), s("gen"), s("satin"), s("--p"), s("4"), s("--a"), s("2")]);
    add("matrix_gen_satin_bad", vec![s("matrix"), s("gen"), s("satin"), s("--p"), s("3"), s("--a"), s("2")]);
    add(
        "matrix_gen_files",
        vec![s("matrix"), s("gen"), s("diagonal"), s("--p"), s("2"), s("--out"), s("out/gen.mat"), s("--design"), s("out/gen.svg")],
    );
    add("matrix_validate_twill", vec![s("matrix"), s("validate"), g("twill.mat")]);
    add("matrix_equiv_twill_basket", vec![s("matrix"), s("equiv"), g("twill.mat"), g("basket.mat")]);
    add("matrix_equiv_twill_twill", vec![s("matrix"), s("equiv"), g("twill.mat"), g("twill.mat")]);
    add("matrix_rank_twill", vec![s("matrix"), s("rank"), g("twill.mat")]);
    add("matrix_rank_basket", vec![s("matrix"), s("rank"), g("basket.mat")]);
    add("matrix_design_twill", vec![s("matrix"), s("design"), g("twill.mat"), s("--out"), s("out/twill_design.svg")]);

    for spec in ["twill", "basket", "plain", "satin", "all_over", "kagome", "kagome_mixed"] {
        add(
            &format!("motif_{spec}"),
            vec![
                s("motif"),
                g(&format!("{spec}.spec")),
                s("--out"),
                format!("out/{spec}.motif"),
                s("--svg"),
                format!("out/{spec}.svg"),
                s("--text"),
                format!("out/{spec}.txt"),
            ],
        );
    }
    add("motif_twill_as_basket", vec![s("motif"), g("twill.spec"), s("--matrices"), g("basket.mat")]);
    add("motif_plain_mismatch", vec![s("motif"), g("plain.spec"), s("--matrices"), g("twill.mat")]);

    add(
        "classify_square_m4",
        vec![s("classify"), s("--family"), s("square"), s("--max-module"), s("4"), s("--solutions"), s("2"), s("--out"), s("out/square")],
    );
    add("classify_square_m2", vec![s("classify"), s("--family"), s("square"), s("--max-module"), s("2")]);
    add(
        "classify_kagome_m3",
        vec![s("classify"), s("--family"), s("kagome"), s("--max-module"), s("3"), s("--solutions"), s("8"), s("--out"), s("out/kagome")],
    );
    out
}

/// Runs the whole corpus in a fresh directory and collects every stdout,
/// exit code and written file, keyed by name.
pub fn run_corpus(threads: Option<usize>) -> BTreeMap<String, Vec<u8>> {
    let dir = tempfile::tempdir().expect("temp dir");
    fs::create_dir(dir.path().join("out")).unwrap();
    let mut results = BTreeMap::new();
    for (name, args) in corpus() {
        let run = weave_in(dir.path(), &args, threads);
        results.insert(format!("{name}.stdout"), format!("exit={}\n{}", run.code, run.stdout).into_bytes());
    }
    let mut files: Vec<PathBuf> = Vec::new();
    collect_files(&dir.path().join("out"), &mut files);
    files.sort();
    for f in files {
        let key = f.strip_prefix(dir.path()).unwrap().to_string_lossy().into_owned();
        results.insert(key, fs::read(&f).unwrap());
    }
    results
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) {
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            collect_files(&p, out);
        } else {
            out.push(p);
        }
    }
}

/// Compares the corpus stdouts against `golden/expected`. With
/// `WEAVE_UPDATE_GOLDEN=1` the expected files are rewritten instead.
pub fn check_expected(results: &BTreeMap<String, Vec<u8>>) -> Result<(), String> {
    let dir = golden_dir().join("expected");
    let update = std::env::var("WEAVE_UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    if update {
        fs::create_dir_all(&dir).unwrap();
    }
    let mut mismatches = Vec::new();
    for (key, bytes) in results.iter().filter(|(k, _)| k.ends_with(".stdout")) {
        let path = dir.join(key);
        if update {
            fs::write(&path, bytes).unwrap();
            continue;
        }
        match fs::read(&path) {
            Ok(expected) if &expected == bytes => {}
            Ok(_) => mismatches.push(format!("{key} differs from golden")),
            Err(_) => mismatches.push(format!("{key} has no golden file")),
        }
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(mismatches.join("; "))
    }
}
