//! End-to-end tests driving the `fuzzyqa` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn fuzzyqa<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_fuzzyqa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn build_index(dir: &tempfile::TempDir) -> String {
    let out = dir
        .path()
        .join("fixture.index")
        .to_string_lossy()
        .into_owned();
    let output = fuzzyqa(&[
        "index",
        "--corpus",
        &fixture("corpus"),
        "--taxonomy",
        &fixture("taxonomy.tsv"),
        "--thesaurus",
        &fixture("thesaurus.txt"),
        "--seed",
        "11",
        "--out",
        &out,
    ]);
    assert!(output.status.success(), "index failed: {}", stderr(&output));
    out
}

fn ask_args(index: &str, extra: &[&str], question: &str) -> Vec<String> {
    let mut args: Vec<String> = vec![
        "ask".into(),
        "--index".into(),
        index.into(),
        "--taxonomy".into(),
        fixture("taxonomy.tsv"),
        "--thesaurus".into(),
        fixture("thesaurus.txt"),
        "--senses".into(),
        fixture("senses.tsv"),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    args.push(question.into());
    args
}

#[test]
fn index_prints_counts_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = build_index(&dir);
    assert!(std::path::Path::new(&out).exists());

    let output = fuzzyqa(&[
        "index",
        "--corpus",
        &fixture("corpus"),
        "--taxonomy",
        &fixture("taxonomy.tsv"),
        "--thesaurus",
        &fixture("thesaurus.txt"),
        "--seed",
        "11",
        "--out",
        &out,
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("documents 4"), "{text}");
    assert!(text.contains("clusters 2"), "{text}");
}

#[test]
fn index_missing_required_flag_is_usage_error() {
    let output = fuzzyqa(&["index", "--taxonomy", &fixture("taxonomy.tsv")]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn index_malformed_taxonomy_exits_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "irises\tplant\nbroken\t\n").unwrap();
    let output = fuzzyqa(&[
        "index",
        "--corpus",
        &fixture("corpus"),
        "--taxonomy",
        &bad.to_string_lossy(),
        "--thesaurus",
        &fixture("thesaurus.txt"),
        "--out",
        &dir.path().join("x.index").to_string_lossy(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("line 2"), "{}", stderr(&output));
}

#[test]
fn ask_ranks_irises_doc_first() {
    let dir = tempfile::tempdir().unwrap();
    let index = build_index(&dir);
    let output = fuzzyqa(&ask_args(&index, &[], "Painting by Ravi with subject Blossom"));
    assert!(output.status.success(), "{}", stderr(&output));
    let text = stdout(&output);
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("0\tirises-doc\t"), "{first}");
    let score = first.rsplit('\t').next().unwrap();
    assert_eq!(score.split('.').nth(1).map(str::len), Some(4), "{score}");
}

#[test]
fn ask_keyword_only_reports_no_answers() {
    let dir = tempfile::tempdir().unwrap();
    let index = build_index(&dir);
    let output = fuzzyqa(&ask_args(
        &index,
        &["--keyword-only"],
        "Painting by Ravi with subject Blossom",
    ));
    assert!(output.status.success());
    assert_eq!(stdout(&output).trim(), "no answers");
}

#[test]
fn ask_explain_includes_breakdown_cluster_and_bands() {
    let dir = tempfile::tempdir().unwrap();
    let index = build_index(&dir);
    let output = fuzzyqa(&ask_args(
        &index,
        &["--explain"],
        "Painting by Ravi with subject Blossom",
    ));
    let text = stdout(&output);
    assert!(text.contains("cluster "), "{text}");
    assert!(text.contains("doc-mu "), "{text}");
    assert!(text.contains("sim blossom 0.676382"), "{text}");
    assert!(text.contains("band blossom [0.5000, 0.5000]"), "{text}");
}

#[test]
fn ask_json_is_canonical_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let index = build_index(&dir);
    let output = fuzzyqa(&ask_args(
        &index,
        &["--format", "json"],
        "Painting by Ravi with subject Blossom",
    ));
    assert!(output.status.success());
    let text = stdout(&output);
    let value: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert!(value["answers"].as_array().is_some_and(|a| !a.is_empty()));
    assert_eq!(value["answers"][0]["title"], "irises-doc");
    // Canonical key order: re-serializing reproduces the bytes.
    assert_eq!(serde_json::to_string(&value).unwrap(), text.trim());
}

#[test]
fn ask_stdout_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let index = build_index(&dir);
    let args = ask_args(&index, &["--explain"], "Painting by Ravi with subject Blossom");
    let first = fuzzyqa(&args);
    let second = fuzzyqa(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn ask_empty_question_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let index = build_index(&dir);
    let output = fuzzyqa(&ask_args(&index, &[], "the and of"));
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("no keywords"));
}

#[test]
fn sim_identity_and_fixture_values() {
    let output = fuzzyqa(&["sim", "--taxonomy", &fixture("taxonomy.tsv"), "irises", "irises"]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("St=1.000000"));

    let output = fuzzyqa(&["sim", "--taxonomy", &fixture("taxonomy.tsv"), "blossom", "irises"]);
    let text = stdout(&output);
    assert!(text.contains("d=2"), "{text}");
    assert!(text.contains("S=1"), "{text}");
    assert!(text.contains("St=0.676382"), "{text}");
}

#[test]
fn sim_unknown_term_exits_one() {
    let output = fuzzyqa(&["sim", "--taxonomy", &fixture("taxonomy.tsv"), "blossom", "ravi"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("ravi"));
}

#[test]
fn expand_lists_variants_original_first() {
    let output = fuzzyqa(&["expand", "--thesaurus", &fixture("thesaurus.txt"), "sweet tea"]);
    assert!(output.status.success());
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "keywords: sweet tea");
    assert_eq!(lines[1], "sweet tea");
    assert_eq!(lines.len(), 1 + 5, "sweet has four synonyms: {text}");
}

#[test]
fn expand_cap_limits_variants() {
    let output = fuzzyqa(&[
        "expand",
        "--thesaurus",
        &fixture("thesaurus.txt"),
        "--cap",
        "2",
        "sweet tea",
    ]);
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 2);
    assert_eq!(lines[1], "sweet tea");
}

#[test]
fn expand_without_synonyms_is_single_variant() {
    let output = fuzzyqa(&["expand", "--thesaurus", &fixture("thesaurus.txt"), "ravi gallery"]);
    let text = stdout(&output);
    assert_eq!(text.lines().count(), 2, "{text}");
}

#[test]
fn expand_empty_question_exits_one() {
    let output = fuzzyqa(&["expand", "--thesaurus", &fixture("thesaurus.txt"), "the and of"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn cluster_block_fixture_converges_to_planted_blocks() {
    let output = fuzzyqa(&[
        "cluster",
        "--matrix",
        &fixture("matrices/block4.txt"),
        "--clusters",
        "2",
        "--variant",
        "fccstf",
        "--seed",
        "7",
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("converged true"), "{text}");
    let u0: Vec<f64> = text
        .lines()
        .find(|l| l.starts_with("u[0]"))
        .unwrap()
        .split_whitespace()
        .skip(1)
        .map(|v| v.parse().unwrap())
        .collect();
    // Docs 0,1 share one block and docs 2,3 the other.
    assert!((u0[0] - u0[1]).abs() < 0.05, "{u0:?}");
    assert!((u0[2] - u0[3]).abs() < 0.05, "{u0:?}");
    assert!((u0[0] - u0[2]).abs() > 0.8, "{u0:?}");
}

#[test]
fn cluster_single_cluster_memberships_are_one() {
    let output = fuzzyqa(&[
        "cluster",
        "--matrix",
        &fixture("matrices/block4.txt"),
        "--clusters",
        "1",
        "--variant",
        "fccm",
    ]);
    let text = stdout(&output);
    let u_line = text.lines().find(|l| l.starts_with("u[0]")).unwrap();
    assert_eq!(u_line, "u[0] 1.000000 1.000000 1.000000 1.000000");
}

#[test]
fn cluster_codok_explain_reports_clipped_negatives() {
    let output = fuzzyqa(&[
        "cluster",
        "--matrix",
        &fixture("matrices/witness2.txt"),
        "--clusters",
        "2",
        "--variant",
        "codok",
        "--tv",
        "0.5",
        "--seed",
        "3",
        "--explain",
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    // "clipped <u> negative document updates, <v> negative word updates"
    let clip_line = text.lines().find(|l| l.starts_with("clipped")).unwrap();
    let words: Vec<&str> = clip_line.split_whitespace().collect();
    let negative_word_updates: usize = words[5].parse().unwrap();
    assert!(negative_word_updates >= 1, "{clip_line}");
}

#[test]
fn cluster_matrix_parse_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.matrix");
    std::fs::write(&bad, "2 2\n1 0\noops nope\n").unwrap();
    let output = fuzzyqa(&[
        "cluster",
        "--matrix",
        &bad.to_string_lossy(),
        "--clusters",
        "2",
        "--variant",
        "fccm",
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("line 3"), "{}", stderr(&output));
}
