use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cyclebound"));
    c.env_remove("CYCLEBOUND_SEED");
    c
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(format!("{name}.cb"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &tempfile::TempDir, name: &str, src: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, src).unwrap();
    p
}

const INDEFINITE: &str = r#"
variables { base: [x1, x2, x3] }
system { kind: ode f: ["x2", "-x1", "x1*x3"] }
check T2.9 { phi: "1" }
"#;

#[test]
fn established_checks_exit_zero() {
    let o = bin()
        .arg("check")
        .arg(fixture("pfaff_sphere_r4"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("T2.3"));
}

#[test]
fn failed_hypothesis_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "bad.cb", INDEFINITE);
    let o = bin().arg("check").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("fail"));
}

#[test]
fn malformed_manifest_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "broken.cb", "variables { base: [x1 }\n");
    let o = bin().arg("check").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn missing_file_exits_one() {
    let o = bin()
        .arg("check")
        .arg("/nonexistent/none.cb")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = bin()
        .args(["check", "--seed", "7", "--json"])
        .arg(&out)
        .arg(fixture("solenoidal_leaf_r3"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"tool\": \"cyclebound\""));
    assert!(text.contains("\"seed\": 7"));
    assert!(text.contains("\"type\": \"Absence\""));
}

#[test]
fn seed_comes_from_environment() {
    let run = |seed: &str| {
        let o = bin()
            .env("CYCLEBOUND_SEED", seed)
            .args(["check", "--json", "-"])
            .arg(fixture("partial_dulac_r3"))
            .output()
            .unwrap();
        stdout(&o)
    };
    let a = run("11");
    assert!(a.contains("\"seed\": 11"));
    assert_eq!(a, run("11"));
    let flag = bin()
        .env("CYCLEBOUND_SEED", "11")
        .args(["check", "--seed", "12", "--json", "-"])
        .arg(fixture("partial_dulac_r3"))
        .output()
        .unwrap();
    assert!(stdout(&flag).contains("\"seed\": 12"));
}

#[test]
fn only_selects_by_theorem() {
    let o = bin()
        .args(["check", "--only", "PI-Pf", "--json", "-"])
        .arg(fixture("pfaff_sphere_r4"))
        .output()
        .unwrap();
    let s = stdout(&o);
    assert!(s.contains("\"theorem_id\": \"PI-Pf\""));
    assert!(!s.contains("\"theorem_id\": \"T2.3\""));
}

#[test]
fn sequential_matches_parallel() {
    let run = |extra: &[&str]| {
        let o = bin()
            .args(["check", "--json", "-"])
            .args(extra)
            .arg(fixture("total_five_spheres"))
            .output()
            .unwrap();
        stdout(&o)
    };
    assert_eq!(run(&[]), run(&["--sequential"]));
}

#[test]
fn eval_prints_expression() {
    let o = bin()
        .args(["eval", "--expr", "d(g)"])
        .arg(fixture("ode_sphere_r3"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.trim(), "(2*x1)*dx1 + (2*x2)*dx2 + (2*x3)*dx3");
}

#[test]
fn eval_reports_position() {
    let o = bin()
        .args(["eval", "--expr", "x1 +* x2"])
        .arg(fixture("ode_sphere_r3"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("5"));
}

#[test]
fn probe_reports_small_drift() {
    let o = bin()
        .args(["probe", "--candidate", "sphere"])
        .arg(fixture("ode_sphere_r3"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("sphere") && !s.contains("control"), "{s}");
}
