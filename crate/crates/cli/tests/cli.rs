use std::path::Path;
use std::process::{Command, Output};

fn snf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snf")).args(args).output().unwrap()
}

fn run_twice(args: &[&str]) -> (Vec<u8>, Vec<u8>) {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let mut full: Vec<&str> = args.to_vec();
        let p = path.to_str().unwrap().to_string();
        full.extend(["--out", &p]);
        let o = snf(&full);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(path.with_extension("json").exists());
        outs.push(std::fs::read(&path).unwrap());
    }
    (outs.remove(0), outs.remove(0))
}

#[test]
fn every_command_is_byte_deterministic() {
    let cases: [&[&str]; 5] = [
        &["pattern", "--array", "lsa:31:2", "--focus-range", "10", "--focus-sin", "0.2", "--sin", "-1:1:21", "--range", "2:20:7"],
        &["lobes", "--array", "eca:4:3:6", "--focus-range", "20", "--focus-deg", "5", "--measure"],
        &["beamform", "--array", "eca:5:3:4", "--users", "10:2,12:-4,15:8"],
        &["scenario", "--preset", "3", "--trials", "2", "--users", "3"],
        &["gfunc", "--beta1", "-2:2:9", "--beta2", "0:2:5"],
    ];
    for args in cases {
        let (a, b) = run_twice(args);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn scenario_sidecar_holds_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = snf(&["scenario", "--preset", "2", "--trials", "1", "--users", "2", "--seed", "9", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(side["seed"], 9);
    assert_eq!(side["config"]["trials"], 1);
    assert_eq!(side["config"]["users"], 2);
    assert_eq!(side["schema_version"], 1);

    // Re-running from the sidecar's config reproduces the CSV.
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, side["config"].to_string()).unwrap();
    let again = dir.path().join("again.csv");
    let o = snf(&["scenario", "--config", cfg.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    assert_eq!(snf(&["pattern", "--array", "ula:64", "--focus-range", "10", "--out", out]).status.code(), Some(2));
    assert_eq!(snf(&["scenario", "--preset", "7", "--out", out]).status.code(), Some(2));
    assert_eq!(snf(&["scenario", "--preset", "1", "--trials", "0", "--out", out]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"users\": 3}").unwrap();
    assert_eq!(snf(&["scenario", "--config", bad.to_str().unwrap(), "--out", out]).status.code(), Some(2));
    assert_eq!(snf(&["gfunc", "--beta1", "1:2", "--out", out]).status.code(), Some(2));
    assert!(!Path::new(out).exists());
}

#[test]
fn strict_reports_nonconvergence_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let dump = snf(&["scenario", "--preset", "3", "--trials", "1", "--users", "4", "--dump-config"]);
    assert!(dump.status.success());
    let mut c: serde_json::Value = serde_json::from_slice(&dump.stdout).unwrap();
    c["fp"]["max_iter"] = 1.into();
    c["fp"]["tol"] = 0.0.into();
    std::fs::write(&cfg, c.to_string()).unwrap();
    let out = dir.path().join("s.csv");
    let args = ["scenario", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert_eq!(snf(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(snf(&strict).status.code(), Some(3));
}

#[test]
fn matrices_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bf.csv");
    let m = dir.path().join("m");
    let o = snf(&[
        "beamform", "--array", "lsa:21:3", "--users", "8:0,9:5", "--matrices", m.to_str().unwrap(), "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["digital_fp.csv", "analog.csv", "digital.csv"] {
        let text = std::fs::read_to_string(m.join(f)).unwrap();
        assert!(text.starts_with("row,col,re,im"));
    }
    let rows = std::fs::read_to_string(&out).unwrap();
    assert_eq!(rows.lines().count(), 5);
    assert!(rows.starts_with("designer,user,range_m,angle_deg,sinr,rate,converged"));
}
