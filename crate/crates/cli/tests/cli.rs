//! End-to-end checks of the command-line surface: exit codes, file outputs
//! and the usage contract.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sciprofile"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn sciprofile")
}

#[test]
fn help_exits_zero_and_lists_subcommands() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "validate",
        "pca",
        "report",
        "mds",
        "map",
        "compare",
        "reproduce",
    ] {
        assert!(text.contains(sub), "help misses {sub}");
    }
}

#[test]
fn unknown_flag_and_subcommand_exit_two() {
    let out = run(&["--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.to_lowercase().contains("usage"), "{text}");
}

#[test]
fn input_source_is_required_and_exclusive() {
    let out = run(&["validate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["validate", "--fixture", "annexB_f1", "--input", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_fixture_is_clean() {
    let out = run(&["validate", "--fixture", "annexB_f3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0 errors"), "{text}");
}

#[test]
fn validate_bad_matrix_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "iso2,name,region,a,b,c\nAA,A,R,-1,2,3\n").unwrap();
    let out = run(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("negative"), "{text}");
}

#[test]
fn pca_precondition_failure_exits_one() {
    // the world-only table has no country rows to correlate
    let out = run(&["pca", "--fixture", "table1_world", "--k", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("correlation needs"), "{text}");
}

#[test]
fn unknown_fixture_names_the_options() {
    let out = run(&["validate", "--fixture", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("annexB_f1"), "{text}");
}

#[test]
fn pca_writes_model_and_variance_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "pca",
        "--fixture",
        "annexB_f1",
        "--k",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json = std::fs::read_to_string(dir.path().join("pca_model.json")).unwrap();
    assert!(json.starts_with("{\"mode\":\"q_mode\",\"k\":3,"));
    assert!(dir.path().join("pca_variance.tsv").exists());
    assert!(dir.path().join("pca_variance.txt").exists());
}

#[test]
fn map_writes_svg_ascii_and_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "map",
        "--fixture",
        "annexB_f2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg = std::fs::read_to_string(dir.path().join("map.svg")).unwrap();
    // 11 countries + 3 poles
    assert_eq!(svg.matches("<circle").count(), 14);
    assert!(dir.path().join("map.txt").exists());
    assert!(dir.path().join("embedding.csv").exists());
}

#[test]
fn mds_embedding_lists_countries_and_poles() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "mds",
        "--fixture",
        "annexB_f3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("embedding.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "label,x,y");
    assert_eq!(lines.len(), 1 + 10 + 3);
    assert!(lines.iter().any(|l| l.starts_with("F3,")));
}

#[test]
fn out_dir_env_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["compare"])
        .env("SCIPROFILE_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let tsv = std::fs::read_to_string(dir.path().join("comparison.tsv")).unwrap();
    assert!(tsv.contains("91.71536"));
    assert!(tsv.contains("89.13931"));
}

#[test]
fn fixtures_subcommand_lists_contract_names() {
    let out = run(&["fixtures"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "table1_world",
        "table2_sjr_variance",
        "table3_esi_variance",
        "annexA_loadings",
        "annexB_f1",
        "annexB_f2",
        "annexB_f3",
    ] {
        assert!(text.lines().any(|l| l == name), "missing {name}");
    }
}

#[test]
fn report_outputs_depend_only_on_input() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    for dir in [&dir1, &dir2] {
        let out = run(&[
            "report",
            "--fixture",
            "annexB_f1",
            "--theta",
            "0.8",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in ["rankings.tsv", "membership.tsv", "profile_f1.tsv"] {
        let a = std::fs::read(dir1.path().join(name)).unwrap();
        let b = std::fs::read(dir2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn subcommands_write_only_into_out_dir() {
    let parent = tempfile::tempdir().unwrap();
    let out_dir = parent.path().join("only-here");
    let before: Vec<_> = std::fs::read_dir(parent.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert!(before.is_empty());
    let out = run(&["reproduce", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let entries: Vec<_> = std::fs::read_dir(parent.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(entries, vec![std::ffi::OsString::from("only-here")]);
    assert!(Path::new(&out_dir).join("map.svg").exists());
}
