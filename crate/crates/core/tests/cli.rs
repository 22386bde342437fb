//! End-to-end CLI tests against the real binary and the committed
//! fixtures.

use std::path::PathBuf;
use std::process::Command;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fontaine"))
}

#[test]
fn classify_single_field_json() {
    let out = bin()
        .args([
            "classify",
            "--field",
            fixtures().join("records/q.json").to_str().unwrap(),
            "--pack",
            fixtures().join("packs/1.1.1.1.pack.json").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert_eq!(v["schema"], "fontaine.verdict.v1");
    assert_eq!(v["outcome"]["kind"], "fontaine");
    assert_eq!(v["path"], "one_prime");
}

#[test]
fn classify_rejection_is_conclusive_exit_zero() {
    // The truthful sqrt(21) record violates the narrow-class-number
    // hypothesis: a rejection, exit code 0.
    let out = bin()
        .args([
            "classify",
            "--field",
            fixtures().join("records/quad_sqrt21.json").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert_eq!(v["outcome"]["kind"], "rejected");
}

#[test]
fn missing_required_flag_is_usage_error() {
    let out = bin().args(["classify"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn sort_word_text_and_json() {
    let out = bin()
        .args(["sort-word", "Z2,mu2", "--primes", "1", "--format", "text"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "mu2,Z2");

    let out = bin().args(["sort-word", "p3,p1p2", "--primes", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    assert_eq!(v["sorted"], "p1,p2p3");
    assert_eq!(v["trace"].as_array().unwrap().len(), 2);
}

#[test]
fn fetch_offline_replays_the_cached_corpora() {
    for (degree, want) in [("2", 16usize), ("3", 64)] {
        let out = bin()
            .args([
                "fetch",
                "--degree",
                degree,
                "--max-rd",
                "9.5",
                "--offline",
                "--cache-dir",
                fixtures().join("cache").to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "fetch degree {degree}");
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert_eq!(stdout.lines().count(), want, "degree {degree} record count");
        for line in stdout.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["schema"], "fontaine.fieldrecord.v1");
        }
    }
}

#[test]
fn fetch_offline_cache_miss_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "fetch",
            "--degree",
            "5",
            "--max-rd",
            "9.5",
            "--offline",
            "--cache-dir",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn batch_tally_reproduces_the_deg2_row_shape() {
    let out = bin()
        .args([
            "batch",
            "--input",
            fixtures().join("records/deg2.jsonl").to_str().unwrap(),
            "--packs",
            fixtures().join("packs").to_str().unwrap(),
            "--tally",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    // Exit 2: the corpus contains pack-limited inconclusive fields.
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "degree,lmfdb,one_prime_d1,two_prime_d1,two_prime_d2,three_prime_d1,three_prime_d2,s,total"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("2,16,3,1,"), "row was {row}");
}

#[test]
fn tally_subcommand_aggregates_a_verdict_stream() {
    let dir = tempfile::tempdir().unwrap();
    // Produce a verdict stream first.
    let out = bin()
        .args([
            "batch",
            "--input",
            fixtures().join("records/deg1.jsonl").to_str().unwrap(),
            "--packs",
            fixtures().join("packs").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stream = dir.path().join("verdicts.jsonl");
    std::fs::write(&stream, &out.stdout).unwrap();
    let out = bin()
        .args(["tally", "--input", stream.to_str().unwrap(), "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().nth(1).unwrap().starts_with("1,1,1,"));
}

#[test]
fn fixtures_verify_subcommand() {
    let out = bin()
        .args(["fixtures-verify", "--dir", fixtures().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    // A tampered copy fails.
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path();
    std::fs::write(copy.join("a.json"), b"data").unwrap();
    std::fs::write(copy.join("MANIFEST.json"), br#"{"files": {"a.json": "deadbeef"}}"#).unwrap();
    let out = bin()
        .args(["fixtures-verify", "--dir", copy.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, br#"{"tower_cap": 3}"#).unwrap();
    // tower_cap 3 (< 4) from the config must override the flag and be
    // rejected as usage.
    let out = bin()
        .args([
            "classify",
            "--field",
            fixtures().join("records/q.json").to_str().unwrap(),
            "--tower-cap",
            "20",
            "--config",
            cfg.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn text_format_is_supported_everywhere_json_validates() {
    let out = bin()
        .args([
            "classify",
            "--field",
            fixtures().join("records/q.json").to_str().unwrap(),
            "--format",
            "text",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2)); // no pack: inconclusive
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("1.1.1.1"));
}
