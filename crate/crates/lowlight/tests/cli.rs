mod common;

use std::fs;
use std::process::Command;

use lowlight::cli::{parse_args, run_with};
use lowlight::io::save_image;
use lowlight_core::synthetic;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["lowlight"];
    argv.extend_from_slice(args);
    let config = parse_args(argv).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(&config, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn batch_continues_past_unreadable_file() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = common::write_corpus(dir.path(), 2);
    let broken = dir.path().join("broken.png");
    fs::write(&broken, b"\x89PNG\r\n\x1a\nnope").unwrap();
    let out_dir = dir.path().join("out");
    let (a, b, c) = (
        inputs[0].to_str().unwrap(),
        broken.to_str().unwrap(),
        inputs[1].to_str().unwrap(),
    );
    let (code, stdout, stderr) = run(&[a, b, c, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("broken.png"), "{stderr}");
    let lines: Vec<Value> = stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0]["file"].as_str().unwrap().ends_with("img0.png"));
    assert!(lines[1]["file"].as_str().unwrap().ends_with("img1.png"));
    let mut written: Vec<_> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    written.sort();
    assert_eq!(written, ["img0.enhanced.png", "img1.enhanced.png"]);
}

#[test]
fn directory_input_and_metrics_line() {
    let dir = tempfile::tempdir().unwrap();
    common::write_corpus(dir.path(), 3);
    fs::write(dir.path().join("readme.txt"), "skip me").unwrap();
    let out_dir = dir.path().join("out");
    let (code, stdout, stderr) = run(&[dir.path().to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    let lines: Vec<Value> = stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    for line in &lines {
        assert!(line["psnr_db"].is_null());
        assert!(line["ssim"].is_null());
        assert!(line["mean_luma"].as_f64().unwrap() > 0.0);
        assert!(line["sigma_used"].as_f64().unwrap() > 0.0);
        assert!(line["threshold"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn keep_intermediates_writes_all_layers() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = common::write_corpus(dir.path(), 1);
    let out_dir = dir.path().join("layers");
    let (code, _, stderr) = run(&[
        inputs[0].to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--keep-intermediates",
        "--no-denoise",
    ]);
    assert_eq!(code, 0, "{stderr}");
    for suffix in ["enhanced.png", "illum.png", "refl.png", "illum-enh.png", "curve.csv"] {
        assert!(out_dir.join(format!("img0.{suffix}")).is_file(), "missing {suffix}");
    }
    let csv = fs::read_to_string(out_dir.join("img0.curve.csv")).unwrap();
    let rows: Vec<_> = csv.lines().collect();
    assert_eq!(rows.len(), 256);
    assert!(rows[0].starts_with("0,"));
    assert!(rows[255].starts_with("255,"));
}

#[test]
fn compare_mode_reports_both_variants() {
    let dir = tempfile::tempdir().unwrap();
    let truth = synthetic::lit_room(64, 64);
    let reference = dir.path().join("ref.png");
    let dark = dir.path().join("dark.png");
    save_image(&truth, &reference).unwrap();
    save_image(&truth.map(|v| v * 0.25), &dark).unwrap();
    let out_dir = dir.path().join("out");
    let (code, stdout, stderr) = run(&[
        dark.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--compare",
        "--reference",
        reference.to_str().unwrap(),
        "--noise-sigma",
        "0.0588",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0, "{stderr}");
    let line: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(line["mode"], "compare");
    for variant in ["full", "agcwd_only"] {
        let v = &line[variant];
        assert!(v["psnr_db"].as_f64().unwrap() > 0.0);
        assert!(v["ssim"].as_f64().unwrap() > 0.0);
        assert!(v["sigma_estimate"].as_f64().is_some());
    }
    assert!(line["full"]["sigma_estimate"].as_f64() < line["agcwd_only"]["sigma_estimate"].as_f64());
}

#[test]
fn mismatched_reference_fails_file() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = common::write_corpus(dir.path(), 1);
    let reference = dir.path().join("small.png");
    save_image(&synthetic::lit_room(16, 16), &reference).unwrap();
    let (code, stdout, stderr) = run(&[
        inputs[0].to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
        "--reference",
        reference.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(stdout.is_empty());
    assert!(stderr.contains("img0.png"));
}

#[test]
fn binary_end_to_end() {
    let exe = env!("CARGO_BIN_EXE_lowlight");
    let dir = tempfile::tempdir().unwrap();
    let inputs = common::write_corpus(dir.path(), 1);
    let out_dir = dir.path().join("bin-out");
    let output = Command::new(exe)
        .arg(&inputs[0])
        .arg("--out")
        .arg(&out_dir)
        .args(["--sigma", "0.05", "--jobs", "2"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let line: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(line["sigma_used"].as_f64(), Some(0.05));
    assert!(out_dir.join("img0.enhanced.png").is_file());

    let bad = Command::new(exe).args(["x.png", "--percentile", "100"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--percentile"));

    let unknown = Command::new(exe).args(["x.png", "--gain", "2"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("--gain"));

    let missing = Command::new(exe).arg(dir.path().join("nothing.png")).arg("--out").arg(&out_dir).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}
