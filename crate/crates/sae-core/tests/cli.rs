//! End-to-end checks of the `sae` binary: flag grammar, exit codes, file
//! outputs. Heavy numerical paths are covered by the acceptance suite; this
//! exercises the process boundary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn sae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sae"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sae-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn truth_table_csv_has_16_rows_and_ed_column() {
    let out = sae(&["truth-table", "--cell", "approx-ppc", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a,b,c_in,s_in,s,c,ed");
    assert_eq!(lines.len(), 17);
    let negatives = lines.iter().filter(|l| l.ends_with(",-1")).count();
    let positives = lines.iter().filter(|l| l.ends_with(",1")).count();
    assert_eq!((negatives, positives), (4, 1));
}

#[test]
fn unknown_subcommand_exits_1() {
    let out = sae(&["no-such-thing"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = sae(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for sub in [
        "truth-table",
        "eval-pe",
        "simulate",
        "analyze",
        "sweep",
        "dct",
        "edge",
        "sharpen",
        "repro",
    ] {
        assert!(stdout(&out).contains(sub), "help lists {sub}");
    }
}

#[test]
fn missing_input_file_exits_2() {
    let out = sae(&[
        "simulate",
        "--width",
        "8",
        "--a-file",
        "/nonexistent/a.csv",
        "--b-file",
        "/nonexistent/b.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_pe_reports_result_oracle_and_ed() {
    let out = sae(&[
        "eval-pe", "--width", "4", "--a", "3", "--b", "5", "--c", "7",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "result=22 exact=22 ed=0");
}

#[test]
fn simulate_identity_prints_cycles() {
    let dir = temp_dir("sim");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    std::fs::write(&a, "1,0,0\n0,1,0\n0,0,1\n").unwrap();
    std::fs::write(&b, "1,0,0\n0,1,0\n0,0,1\n").unwrap();
    let out = sae(&[
        "simulate",
        "--size",
        "3",
        "--width",
        "8",
        "--signed",
        "--a-file",
        a.to_str().unwrap(),
        "--b-file",
        b.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("cycles=7"), "{text}");
    assert!(text.starts_with("1,0,0\n0,1,0\n0,0,1\n"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_trace_writes_jsonl() {
    let dir = temp_dir("trace");
    let a = dir.join("a.csv");
    std::fs::write(&a, "1,2\n3,4\n").unwrap();
    let trace = dir.join("trace.jsonl");
    let out = sae(&[
        "simulate",
        "--width",
        "8",
        "--a-file",
        a.to_str().unwrap(),
        "--b-file",
        a.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&trace).unwrap();
    // One snapshot per cycle plus the initial state.
    assert_eq!(text.lines().count(), 5);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("cycle").is_some());
        assert!(v.get("accumulators").is_some());
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn analyze_emits_csv_with_header() {
    let out = sae(&["analyze", "--width", "4", "--k", "2", "--exhaustive"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("width,signedness,k,er,med,nmed,mred,max_ed,samples,protocol,seed"));
    assert!(text.contains("4,unsigned,2,"));
}

#[test]
fn sweep_json_is_parseable_and_sorted() {
    let out = sae(&[
        "sweep",
        "--width",
        "4",
        "--signed",
        "--ks",
        "4,2,3",
        "--samples",
        "500",
        "--seed",
        "9",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ks: Vec<u64> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["k"].as_u64().unwrap())
        .collect();
    assert_eq!(ks, vec![2, 3, 4]);
}

#[test]
fn dct_writes_artifacts_for_tiny_image() {
    let dir = temp_dir("dct");
    let img = dir.join("in.pgm");
    // 16x16 gradient.
    let mut bytes = b"P5\n16 16\n255\n".to_vec();
    for y in 0..16u32 {
        for x in 0..16u32 {
            bytes.push((x * 16 + y * 3) as u8);
        }
    }
    std::fs::write(&img, bytes).unwrap();
    let out_dir = dir.join("out");
    let out = sae(&[
        "dct",
        "--input",
        img.to_str().unwrap(),
        "--k",
        "2",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for f in ["coefficients.pgm", "reconstructed.pgm", "score.json"] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }
    let score: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("score.json")).unwrap())
            .unwrap();
    assert_eq!(score["k"], 2);
    assert!(score["psnr_db"].as_f64().unwrap() > 20.0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn edge_supports_kernel_override() {
    let dir = temp_dir("edge");
    let img = dir.join("in.pgm");
    let mut bytes = b"P5\n8 8\n255\n".to_vec();
    bytes.extend((0..64u32).map(|i| (i * 4) as u8));
    std::fs::write(&img, bytes).unwrap();
    let out_dir = dir.join("out");
    let out = sae(&[
        "edge",
        "--input",
        img.to_str().unwrap(),
        "--k",
        "2",
        "--kernel",
        "0,-1,0,-1,4,-1,0,-1,0",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("edges.pgm").exists());
    std::fs::remove_dir_all(&dir).ok();
}
