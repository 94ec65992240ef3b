//! End-to-end tests of the boxzeta binary: exit codes, formats, and cache
//! transparency.

use std::path::Path;
use std::process::{Command, Output};

fn boxzeta() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boxzeta"))
}

fn run(args: &[&str]) -> Output {
    boxzeta().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn count_surface_brute_example() {
    let out = run(&["count", "--variety", "surface", "--prime", "3", "--brute"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("24"), "count missing: {text}");
    assert!(text.contains("brute"), "method missing: {text}");
}

#[test]
fn count_json_shape() {
    let out = run(&[
        "count",
        "--variety",
        "curve-x",
        "--prime",
        "3",
        "--degree",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["variety"], "curve-x");
    assert_eq!(v["degree"], 2);
    assert_eq!(v["count"], 24);
}

#[test]
fn ap_f32_example() {
    let out = run(&["ap", "--form", "f32", "--prime", "13"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("6"), "got: {}", stdout(&out));
}

#[test]
fn gpair_members() {
    let out = run(&["gpair", "--prime", "11", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["re"], 0);
    assert_eq!(v["im"], 6);
    assert_eq!(v["members"], "{6i, -6i}");
}

#[test]
fn qexp_g64_reports_undetermined_composite() {
    let out = run(&["qexp", "--form", "g64", "--limit", "33", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    let row33 = rows.iter().find(|r| r["n"] == 33).unwrap();
    assert_eq!(row33["kind"], "undetermined");
    let row9 = rows.iter().find(|r| r["n"] == 9).unwrap();
    assert_eq!(row9["kind"], "int");
    assert_eq!(row9["value"], -1);
}

#[test]
fn verify_exit_zero_and_all_residuals_zero() {
    let out = run(&["verify", "--pmax", "97", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["all_zero"], true);
    assert_eq!(
        v["multiplicities"],
        serde_json::json!([3, 1, 3, 10, 2, 1, 3])
    );
}

#[test]
fn verify_alternative_convention_fails_with_exit_two() {
    let out = run(&[
        "verify",
        "--pmax",
        "97",
        "--h16-inert",
        "minus2p",
        "--format",
        "json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "alternative convention must fail verification"
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["all_zero"], false);
    // the failure pattern is +6p at every p = 3 (mod 4)
    assert_eq!(v["residuals"]["3"], 18);
    assert_eq!(v["residuals"]["7"], 42);
    assert_eq!(v["residuals"]["5"], 0);
}

#[test]
fn bad_prime_two_is_an_explicit_error() {
    for args in [
        vec!["count", "--variety", "surface", "--prime", "2"],
        vec!["ap", "--form", "h16", "--prime", "2"],
        vec!["gpair", "--prime", "2"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "args: {args:?}");
        assert!(
            stderr(&out).contains("bad prime excluded"),
            "args: {args:?}, stderr: {}",
            stderr(&out)
        );
    }
}

#[test]
fn usage_errors_exit_one() {
    let unknown = run(&[
        "count",
        "--variety",
        "surface",
        "--prime",
        "3",
        "--no-such-flag",
    ]);
    assert_eq!(unknown.status.code(), Some(1));
    let bad_value = run(&["count", "--variety", "nonsense", "--prime", "3"]);
    assert_eq!(bad_value.status.code(), Some(1));
    let bad_degree = run(&[
        "count",
        "--variety",
        "surface",
        "--prime",
        "3",
        "--degree",
        "2",
    ]);
    assert_eq!(bad_degree.status.code(), Some(1));
    assert!(stderr(&bad_degree).contains("curve-x"));
    let out_of_range = run(&[
        "count",
        "--variety",
        "curve-x",
        "--prime",
        "3",
        "--degree",
        "3",
    ]);
    assert_eq!(out_of_range.status.code(), Some(1));
    let no_args = boxzeta().output().unwrap();
    assert_eq!(no_args.status.code(), Some(1));
}

#[test]
fn euler_presets_have_documented_degrees() {
    let out = run(&[
        "euler", "--preset", "sbar", "--pmax", "97", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["degree"], 30);
    let value = v["value"].as_f64().unwrap();
    assert!((value - 1.303607459132512).abs() < 1e-9, "value = {value}");

    for (preset, degree) in [("s-paper", 78), ("s-perm", 78)] {
        let out = run(&[
            "euler", "--preset", preset, "--pmax", "29", "--format", "json",
        ]);
        assert_eq!(out.status.code(), Some(0), "preset {preset}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["degree"], degree, "preset {preset}");
    }
}

#[test]
fn euler_csv_declares_exclusion_and_row_values() {
    let out = run(&[
        "euler", "--preset", "sbar", "--pmax", "7", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.contains("# index-2 data excluded"),
        "missing exclusion header: {text}"
    );
    let row5 = text
        .lines()
        .find(|l| l.starts_with("5,"))
        .expect("row for p = 5");
    assert!(
        row5.starts_with("5,-2,2,"),
        "a_5(f32) = -2 and a_5(f64) = 2: {row5}"
    );
    let row3 = text
        .lines()
        .find(|l| l.starts_with("3,"))
        .expect("row for p = 3");
    let surface: Vec<&str> = row3.split(',').collect();
    assert_eq!(surface[8], "24", "#surface at 3: {row3}");
}

#[test]
fn euler_rejects_s_in_divergence_region() {
    let out = run(&["euler", "--preset", "sbar", "--pmax", "7", "--s", "2.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("s > 3"), "stderr: {}", stderr(&out));
}

#[test]
fn report_includes_both_hypotheses_and_discrepancy_banner() {
    let out = run(&["report", "--pmax", "97", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["canonical"], true);
    assert_eq!(v["h2_rank"], 30);
    assert_eq!(v["resolved_rank"], 78);
    assert_eq!(v["surface_degree"], 30);
    assert_eq!(v["resolved_degree"], 78);
    let hyps = v["hypotheses"].as_array().unwrap();
    assert_eq!(hyps.len(), 2);
    for h in hyps {
        assert_eq!(h["picard"]["total"], 64, "hypothesis {}", h["action"]);
    }
    assert!(
        v["discrepancy"].as_str().unwrap().contains("24p"),
        "banner must spell out the 24p gap"
    );
    // the two hypotheses agree at p = 5 and differ at p = 3
    assert_eq!(
        hyps[0]["resolved_counts"]["5"],
        hyps[1]["resolved_counts"]["5"]
    );
    assert_ne!(
        hyps[0]["resolved_counts"]["3"],
        hyps[1]["resolved_counts"]["3"]
    );
    let table = run(&["report", "--pmax", "97"]);
    assert!(
        stdout(&table).contains("DISCREPANCY"),
        "table banner missing"
    );
}

fn run_with_cache(args: &[&str], cache: &Path) -> Output {
    let mut all = args.to_vec();
    let dir = cache.to_str().unwrap();
    all.extend(["--cache-dir", dir]);
    boxzeta().args(&all).output().expect("binary runs")
}

#[test]
fn verify_and_fit_json_identical_across_cache_states() {
    let cache = tempfile::tempdir().unwrap();
    for subcommand in ["verify", "fit"] {
        let args = [subcommand, "--pmax", "97", "--format", "json"];
        let uncached = run(&args);
        let cold = run_with_cache(&args, cache.path());
        let warm = run_with_cache(&args, cache.path());
        assert_eq!(uncached.status.code(), Some(0), "{subcommand} uncached");
        assert_eq!(cold.status.code(), Some(0), "{subcommand} cache-cold");
        assert_eq!(warm.status.code(), Some(0), "{subcommand} cache-warm");
        assert_eq!(
            uncached.stdout, cold.stdout,
            "{subcommand}: cold cache changed bytes"
        );
        assert_eq!(
            cold.stdout, warm.stdout,
            "{subcommand}: warm cache changed bytes"
        );
    }
    // the cache really was used: the surface family holds all 24 primes
    let surface = cache.path().join("surface.json");
    let entries: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&surface).unwrap()).unwrap();
    assert_eq!(entries.len(), 24);
    // deleting the cache changes nothing
    std::fs::remove_dir_all(cache.path()).unwrap();
    let after = run(&["verify", "--pmax", "97", "--format", "json"]);
    let again = run(&["verify", "--pmax", "97", "--format", "json"]);
    assert_eq!(after.stdout, again.stdout);
}

#[test]
fn cache_env_var_respected_and_flag_wins() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = boxzeta()
        .args(["count", "--variety", "surface", "--prime", "5"])
        .env("BOXZETA_CACHE", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(
        env_dir.path().join("surface.json").exists(),
        "env-var cache dir unused"
    );

    let out = boxzeta()
        .args(["count", "--variety", "surface", "--prime", "7"])
        .env("BOXZETA_CACHE", env_dir.path())
        .args(["--cache-dir", flag_dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let flag_entries = std::fs::read_to_string(flag_dir.path().join("surface.json")).unwrap();
    assert!(
        flag_entries.contains("p=7"),
        "flag cache dir must hold the new entry"
    );
    let env_entries = std::fs::read_to_string(env_dir.path().join("surface.json")).unwrap();
    assert!(
        !env_entries.contains("p=7"),
        "env cache dir must not receive the entry"
    );
}

#[test]
fn corrupt_cache_recovers_with_warning() {
    let cache = tempfile::tempdir().unwrap();
    std::fs::write(cache.path().join("surface.json"), b"][ definitely not json").unwrap();
    let out = run_with_cache(
        &["count", "--variety", "surface", "--prime", "5"],
        cache.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).contains("48"),
        "recomputed value: {}",
        stdout(&out)
    );
    assert!(
        stderr(&out).contains("corrupt"),
        "warning expected: {}",
        stderr(&out)
    );
    // repaired on write
    let entries: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(cache.path().join("surface.json")).unwrap())
            .unwrap();
    assert_eq!(entries[0]["value"], 48);
}

#[test]
fn jobs_flag_accepted() {
    let out = run(&["verify", "--pmax", "31", "--jobs", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn closed_pipe_does_not_panic() {
    use std::process::Stdio;
    let mut child = boxzeta()
        .args(["qexp", "--form", "h16", "--limit", "100000"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    // Drop the read end before the child can finish writing ~50k lines, the
    // way `boxzeta qexp ... | head` does; the child must die quietly.
    drop(child.stdout.take());
    let out = child.wait_with_output().expect("child reaped");
    assert!(
        !stderr(&out).contains("panic"),
        "broken pipe panicked: {}",
        stderr(&out)
    );
}
