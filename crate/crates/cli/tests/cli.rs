use std::process::Command;

fn fvcond() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fvcond"))
}

fn json(out: &std::process::Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn table1_prints_rows() {
    let out = fvcond().arg("table1").output().unwrap();
    let v = json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
    assert!((v["rows"][0]["gt_half"].as_f64().unwrap() - 0.38).abs() < 0.05);
}

#[test]
fn table1_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("simple.csv");
    let report = dir.path().join("t1.json");
    let status = fvcond()
        .args(["table1", "--csv"])
        .arg(&csv)
        .arg("--out")
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("x,r1,r2"));
    assert_eq!(text.lines().count(), 402);
    assert!(std::fs::read_to_string(report).unwrap().contains("published_gt"));
}

#[test]
fn insecure_preset_needs_flag() {
    let out = fvcond().args(["--preset", "insecure-test", "encode", "0.1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = fvcond()
        .args(["--preset", "insecure-test", "--insecure-ok", "encode", "-0.1"])
        .output()
        .unwrap();
    let v = json(&out);
    assert!((v["decoded"].as_f64().unwrap() + 0.1).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    let out = fvcond().args(["--preset", "nope", "--insecure-ok", "encode", "0.1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = fvcond().args(["--variant", "ge", "table1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "table1 ignores the variant");
    let out = fvcond()
        .args(["--preset", "insecure-test", "--insecure-ok", "--variant", "ge", "select", "0.1", "0.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = fvcond()
        .args(["--preset", "insecure-test", "--insecure-ok", "--int-digits", "1500", "--frac-digits", "8", "encode", "0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = fvcond().args(["--r", "0", "--preset", "insecure-test", "--insecure-ok", "comp", "0.1", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = fvcond().args(["--preset", "insecure-test", "--insecure-ok", "comp", "0.5", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn keygen_then_select_with_saved_keys() {
    let dir = tempfile::tempdir().unwrap();
    let keys = dir.path().join("keys.bin");
    let base = ["--preset", "insecure-test", "--insecure-ok", "--r", "1"];
    let status = fvcond().args(base).arg("keygen").arg("--out").arg(&keys).status().unwrap();
    assert!(status.success());
    let out = fvcond()
        .args(base)
        .args(["select", "0.08", "-0.03", "--keys"])
        .arg(&keys)
        .output()
        .unwrap();
    let v = json(&out);
    let w = v["weights"][0].as_f64().unwrap();
    let o = v["oracle_weights"][0].as_f64().unwrap();
    assert!((w - o).abs() < 1e-3);
    assert_eq!(v["weight_depth"], serde_json::json!([2, 1]));
}

#[test]
fn eval_from_dataset_file() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("pairs.txt");
    std::fs::write(&ds, "# two pairs\n0.05 -0.02\n-0.1, 0.1\n").unwrap();
    let out = fvcond()
        .args(["--preset", "insecure-test", "--insecure-ok", "--r", "1", "eval", "--dataset"])
        .arg(&ds)
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["instance_count"], 2);
    assert_eq!(v["accomplished"], true);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn sweep_noise_free_small_grid() {
    let out = fvcond()
        .args([
            "sweep",
            "--pairs",
            "4",
            "--degrees",
            "16384",
            "--modulus-bits",
            "435",
            "--plain-moduli",
            "4096,65536",
            "--bases",
            "7",
            "--frac-digit-grid",
            "8",
            "--int-digit-grid",
            "8",
        ])
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["ranked"].as_array().unwrap().len(), 2);
    assert_eq!(v["mode"], "noise_free");
}
