use std::process::{Command, Output};
use std::time::Instant;

use proptest::prelude::*;
use serde_json::Value;

use ellsym2::cli::parse_rational;

fn ellsym2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellsym2")).args(args).output().expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

#[test]
fn verify_main_passes_with_18_digits() {
    let out = ellsym2(&["verify", "main", "--digits", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["check_id"], "thm1.4");
    assert_eq!(lines[0]["status"], "pass");
    assert!(lines[0]["digits_agreed"].as_i64().unwrap() >= 18);
    assert_eq!(lines[0]["params"]["digits"], 20);
}

#[test]
fn verify_lemma41_reports_l1_to_l5() {
    let out = ellsym2(&["verify", "lemma41", "--radius", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let ids: Vec<String> = json_lines(&out).iter().map(|v| v["check_id"].as_str().unwrap().to_owned()).collect();
    for id in ["L1", "L2", "L3", "L4", "L5"] {
        assert!(ids.iter().any(|x| x == id), "{id} missing from {ids:?}");
    }
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = ellsym2(&["verify", "everything"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_rational_is_a_usage_error() {
    let out = ellsym2(&["compute", "l31", "--xi", "1/x", "--eta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ellsym2(&["compute", "nothing"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compute_catalan_to_30_digits() {
    let out = ellsym2(&["compute", "lchi4", "--t", "2", "--digits", "30"]);
    assert!(out.status.success());
    let v = &json_lines(&out)[0];
    // mpmath catalan, 40 digits
    let expected = "9.15965594177219015054603514932e-1";
    assert_eq!(v["value"], expected);
}

#[test]
fn compute_gcoeffs_13() {
    let out = ellsym2(&["compute", "gcoeffs", "--N", "13", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("1 0 0 0 -6 0 0 0 9 0 0 0 10"), "{text}");
}

#[test]
fn compute_l31_at_origin() {
    let out = ellsym2(&["compute", "l31", "--xi", "0", "--eta", "0", "--tau", "i"]);
    assert!(out.status.success());
    let v = &json_lines(&out)[0];
    // (4π/9)·Catalan, mpmath
    let got: f64 = v["value"].as_str().unwrap().parse().unwrap();
    assert!((got - 1.278_929_236_270_293_8).abs() < 1e-15);
    assert!(v["error_bound"].is_string());
}

#[test]
fn reruns_are_bit_identical_and_out_file_matches() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let a = ellsym2(&["verify", "prop22"]);
    let b = ellsym2(&["verify", "prop22", "--out", path.to_str().unwrap()]);
    assert!(a.status.success() && b.status.success());
    assert!(b.stdout.is_empty());
    let strip = |s: &str| -> Vec<Value> {
        s.lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).unwrap();
                v["runtime_ms"] = Value::Null;
                v
            })
            .collect()
    };
    let file = std::fs::read_to_string(&path).unwrap();
    assert_eq!(strip(&String::from_utf8_lossy(&a.stdout)), strip(&file));
}

#[test]
fn quick_all_under_five_minutes_with_cache() {
    let cache = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ellsym2"))
        .args(["verify", "all", "--quick", "--format", "text"])
        .env("ELLSYM2_CACHE", cache.path())
        .output()
        .unwrap();
    let secs = started.elapsed().as_secs_f64();
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(secs < 300.0, "{secs} s");
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    assert!(text.contains("zagier37"));
    let cached: Vec<_> = std::fs::read_dir(cache.path()).unwrap().collect();
    assert!(!cached.is_empty(), "a_p table not cached");
}

#[test]
fn periods_and_elllog_targets() {
    let out = ellsym2(&["compute", "periods", "--curve", "37a"]);
    assert!(out.status.success());
    let v = &json_lines(&out)[0];
    let im: f64 = v["value"]["tau"]["im"].as_str().unwrap().parse().unwrap();
    assert!((im - 1.221_127_360_764_627).abs() < 1e-14);

    let out = ellsym2(&["compute", "elllog", "--curve", "E2", "--x", "2", "--y", "0"]);
    assert!(out.status.success());
    assert_eq!(json_lines(&out)[0]["value"]["point"], "(1/2, 0)");
}

proptest! {
    #[test]
    fn rational_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        prop_assert_eq!(parse_rational(&format!("{p}/{q}")).unwrap(), (p, q));
        prop_assert_eq!(parse_rational(&format!(" {p} / {q} ")).unwrap(), (p, q));
    }
}
