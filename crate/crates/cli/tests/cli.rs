use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_splinebem"))
}

#[test]
fn solve_writes_rows_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["solve", "--problem", "parabola", "--degree", "2", "--h", "1/5,1/10", "--svg", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("problem,strategy,d,h,n_h,n_ref"));
    assert!(fs::read_to_string(dir.path().join("convergence.svg")).unwrap().contains("<polyline"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"problem":"parabola","degree":"3","h":"1/5","strategy":"element","ng":12}"#).unwrap();
    let out =
        bin().args(["solve", "--config"]).arg(&cfg).args(["--degree", "2", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("parabola,element-by-element,2,0.2,10,1,12,"), "{row}");
}

#[test]
fn quadbench_and_rule_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["quadbench", "--degrees", "2:3", "--nh", "10", "--dump-rules", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("quadbench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    let rules = fs::read_to_string(dir.path().join("rules_d2_nh10.csv")).unwrap();
    assert!(rules.starts_with("kind,rule,node,eta,weight"));
    assert!(rules.contains("singular"));
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 3] = [
        (&["solve", "--problem", "s-shape", "--h", "1/5"], "problem"),
        (&["solve", "--problem", "parabola", "--h", "0.3"], "problem"),
        (&["solve", "--problem", "parabola", "--h", "1/5", "--strategy", "fast"], "config"),
    ];
    for (args, kind) in cases {
        let out = bin().args(args).arg("--out").arg(dir.path()).output().unwrap();
        assert!(!out.status.success());
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"]["kind"], kind, "{args:?}");
        assert!(err["error"]["message"].as_str().unwrap().len() > 5);
    }
}

#[test]
fn user_curve_must_match_problem_kind() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.json");
    fs::write(&curve, r#"{"degree":2,"breakpoints":[-1,1],"control_points":[[-1,0],[0,1],[1,0]]}"#).unwrap();
    let ok = bin()
        .args(["solve", "--problem", "parabola", "--h", "1/5", "--curve"])
        .arg(&curve)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let bad = bin()
        .args(["solve", "--problem", "closed-smooth", "--degree", "3", "--h", "1/12", "--curve"])
        .arg(&curve)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
