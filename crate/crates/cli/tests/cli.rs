//! End-to-end runs of the `lnlife` binary: subcommand surfaces and the
//! documented exit codes (0 success, 1 configuration error, 2 total source
//! failure).

use std::path::Path;
use std::process::Command;

use lnlife_core::chain::{OutPoint, TxId};
use lnlife_core::gossip::ShortChannelId;
use lnlife_synth::truth::{write_channels_file, PublicChannelEntry};

fn lnlife() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lnlife"))
}

fn synth_corpus(dir: &Path, scenarios: &str) {
    let output = lnlife()
        .args(["synth", "--seed", "3", "--scenarios", scenarios])
        .arg("--out-dir")
        .arg(dir)
        .output()
        .unwrap();
    assert!(output.status.success());
}

#[test]
fn synth_then_report_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), "coopx1=2,coopx2=2,local=1,htlc:2=1,peeling:3=1");

    let out_dir = dir.path().join("report");
    let output = lnlife()
        .args(["report", "--format", "csv", "--workers", "2"])
        .arg("--fixtures")
        .arg(dir.path())
        .arg("--gossip")
        .arg(dir.path().join("gossip.jsonl"))
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(out_dir.join("openings.csv").exists());
    assert!(out_dir.join("diagnostics.json").exists());
}

#[test]
fn report_on_empty_corpus_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), "");
    let out_dir = dir.path().join("report");
    let status = lnlife()
        .arg("report")
        .arg("--fixtures")
        .arg(dir.path())
        .arg("--gossip")
        .arg(dir.path().join("gossip.jsonl"))
        .arg("--out-dir")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let openings = std::fs::read_to_string(out_dir.join("openings.csv")).unwrap();
    assert_eq!(openings.lines().count(), 1);
}

#[test]
fn classify_prints_a_closing_report() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), "coopx2=1");
    let truth = lnlife_synth::truth::read_truth_file(&dir.path().join("truth.jsonl")).unwrap();
    let funding = truth[0].funding;
    let expected = truth[0].closing.as_ref().unwrap().closing_type;

    let output = lnlife()
        .arg("classify")
        .arg("--fixtures")
        .arg(dir.path())
        .args(["--funding", &format!("{}:{}", funding.txid, funding.vout)])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(record["closing"]["closing_type"], expected.label());
}

#[test]
fn detect_private_lists_candidates() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), "peeling:3=1");
    let output = lnlife()
        .arg("detect-private")
        .arg("--fixtures")
        .arg(dir.path())
        .arg("--gossip")
        .arg(dir.path().join("gossip.jsonl"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let lines: Vec<&str> = std::str::from_utf8(&output.stdout)
        .unwrap()
        .lines()
        .collect();
    assert_eq!(lines.len(), 3);
    for line in lines {
        let candidate: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(candidate["chain_depth"].as_u64().unwrap() >= 1);
    }
}

#[test]
fn gossip_stats_reports_updates() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), "fee-rebalance=1,coopx2=2");
    let output = lnlife()
        .args(["gossip-stats", "--min-updates", "100"])
        .arg("--gossip")
        .arg(dir.path().join("gossip.jsonl"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(summary["events"].as_u64().unwrap() > 0);
    assert_eq!(summary["malformed_lines"].as_u64().unwrap(), 0);
    // the rebalance channel yields one strong negative correlation
    let correlations = summary["correlations"].as_array().unwrap();
    assert_eq!(correlations.len(), 1);
    assert!(correlations[0]["correlation"].as_f64().unwrap() < -0.9);
}

#[test]
fn ingest_walks_announced_channels() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), "coopx2=3,local=1");
    let output = lnlife()
        .args(["ingest", "--depth", "1"])
        .arg("--fixtures")
        .arg(dir.path())
        .arg("--gossip")
        .arg(dir.path().join("gossip.jsonl"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(summary["channels"].as_u64().unwrap() >= 4);
    assert_eq!(summary["failed"].as_u64().unwrap(), 0);
    assert_eq!(summary["channels"], summary["walked"]);
}

#[test]
fn config_errors_exit_one() {
    // REST source without a channel list cannot resolve scids
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), "coopx1=1");
    let status = lnlife()
        .args(["report", "--rest", "http://127.0.0.1:1"])
        .arg("--gossip")
        .arg(dir.path().join("gossip.jsonl"))
        .arg("--out-dir")
        .arg(dir.path().join("report"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // unknown arguments are configuration errors too
    let status = lnlife()
        .args(["report", "--no-such-flag"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // as is a missing source
    let status = lnlife()
        .arg("classify")
        .args(["--funding", "00:0"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn total_source_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), "coopx1=1");
    // a channel list pointing at an unreachable REST endpoint
    let channels = vec![PublicChannelEntry {
        scid: ShortChannelId {
            block: 1,
            tx_index: 0,
            vout: 0,
        },
        funding: OutPoint::new(TxId([9u8; 32]), 0),
    }];
    let channels_path = dir.path().join("list.jsonl");
    write_channels_file(&channels_path, &channels).unwrap();

    let status = lnlife()
        .args(["report", "--rest", "http://127.0.0.1:1", "--retries", "0"])
        .arg("--gossip")
        .arg(dir.path().join("gossip.jsonl"))
        .arg("--channels")
        .arg(&channels_path)
        .arg("--out-dir")
        .arg(dir.path().join("report"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
