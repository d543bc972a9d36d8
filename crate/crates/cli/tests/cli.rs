use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_needlets"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn usage_errors_exit_with_two() {
    let o = Command::new(env!("CARGO_BIN_EXE_needlets")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["kernel", "eval", "--family", "torus", "--x", "0", "--y", "0"], dir.path()).status.code(), Some(2));
}

#[test]
fn cutoff_check_reports_partition_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cutoff", "check", "--type", "c", "--epsilon", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("partition deviation"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cutoff_check.json")).unwrap()).unwrap();
    assert!(report["partition_deviation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn chebcheb_type_a_value_is_one_over_pi_squared() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["decay", "counterexample", "--variant", "chebcheb", "--cutoff", "typeA"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("value 0.101321183642") && text.contains("match"), "{text}");
}

#[test]
fn envelope_csv_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["decay", "envelope", "--family", "sphere(2)", "--n", "16", "--seed", "7"];
    assert!(run(&args, a.path()).status.success());
    assert!(run(&args, b.path()).status.success());
    let (x, y) = (fs::read(a.path().join("envelope.csv")).unwrap(), fs::read(b.path().join("envelope.csv")).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
}

#[test]
fn failed_verification_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["quad", "verify", "--m", "12", "--tolerance", "0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    let o = run(&["needlet", "parseval", "--trials", "2", "--tolerance", "0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"family": "jacobi(1,0.5)", "n": 24, "cutoff": {"kind": "typeC", "epsilon": 0.5}}"#).unwrap();
    let o = run(&["kernel", "grid", "--points", "5", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let desc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("kernel.json")).unwrap()).unwrap();
    let text = desc.to_string();
    assert!(text.contains("24") && text.contains("0.5"), "{text}");
    let csv = fs::read_to_string(dir.path().join("kernel_grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 25);

    let o = run(&["needlet", "build", "--jmax", "3", "--family", "hermite", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("hermite") && stdout(&o).contains("j_max 3"));
}
