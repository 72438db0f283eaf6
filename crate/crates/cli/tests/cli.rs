use std::path::Path;
use std::process::{Command, Output};

fn dnls(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnls"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .env("DNLS_WORKERS", "2")
        .output()
        .expect("dnls starts")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SOLITON: &str = r#"
name = "soliton"
dim = 1
p = 3.0

[grid]
points = 512
half_length = 32.0

[time]
t_end = 1.0
dt = 0.001
cadence = 0.01

[initial]
kind = "soliton"
eta = 1.0
"#;

#[test]
fn run_writes_csv_and_identities_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("soliton.toml");
    std::fs::write(&cfg, SOLITON).unwrap();
    let runs = tmp.path().join("runs");
    let o = dnls(&["run", cfg.to_str().unwrap()], &runs);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let csv = runs.join("soliton").join("diagnostics.csv");
    let rows = std::fs::read_to_string(&csv).unwrap().lines().count();
    assert_eq!(rows, 102);
    assert!(runs.join("soliton").join("manifest.toml").exists());

    let reports = tmp.path().join("reports");
    let o = dnls(&["verify-identities", csv.to_str().unwrap()], &reports);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(reports.join("identities.txt").exists());
}

#[test]
fn convergence_on_soliton_reports_second_order() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("soliton.toml");
    std::fs::write(&cfg, SOLITON).unwrap();
    let o = dnls(&["convergence", cfg.to_str().unwrap(), "--dts", "4e-3,2e-3,1e-3,5e-4"], tmp.path());
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let order: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("order = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((order - 2.0).abs() < 0.1, "{text}");
}

#[test]
fn sweep_runs_every_config() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SOLITON.replace("name = \"soliton\"\n", "").replace("t_end = 1.0", "t_end = 0.1");
    let mut suite = String::from("[suite]\nname = \"pair\"\n");
    for name in ["a", "b"] {
        let run = body
            .replace("[grid]", "[run.grid]")
            .replace("[time]", "[run.time]")
            .replace("[initial]", "[run.initial]");
        suite.push_str(&format!("\n[[run]]\nname = \"{name}\"{run}"));
    }
    let path = tmp.path().join("suite.toml");
    std::fs::write(&path, &suite).unwrap();
    let out = tmp.path().join("runs");
    let o = dnls(&["sweep", path.to_str().unwrap()], &out);
    assert_eq!(code(&o), 0, "{}\n{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(out.join("a").join("diagnostics.csv").exists());
    assert!(out.join("b").join("diagnostics.csv").exists());
}

#[test]
fn bootstrap_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("x.csv");
    std::fs::write(&csv, "t,X\n0,1.0\n1,1.2\n2,1.35\n").unwrap();
    let p = csv.to_str().unwrap();
    let run = |b: &str, theta: &str| code(&dnls(&["check-bootstrap", p, "--a", "1", "--b", b, "--theta", theta], tmp.path()));
    assert_eq!(run("0.2", "2"), 0);
    assert_eq!(run("0.3", "2"), 1);
    assert_eq!(run("0.2", "1"), 2);
    assert!(tmp.path().join("bootstrap.txt").exists());
}

#[test]
fn gronwall_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("g.csv");
    let mut text = String::from("t,f,g,h\n");
    for i in 0..11 {
        text.push_str(&format!("{},{},0,0\n", i as f64 * 0.1, if i == 6 { 3.0 } else { 1.0 }));
    }
    std::fs::write(&csv, text).unwrap();
    let p = csv.to_str().unwrap();
    assert_eq!(code(&dnls(&["check-gronwall", p, "--C", "1", "--beta", "0.5"], tmp.path())), 1);
    assert_eq!(code(&dnls(&["check-gronwall", p, "--C", "3", "--beta", "0.5"], tmp.path())), 0);
}

#[test]
fn usage_and_config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&dnls(&["gn-constant", "--dim", "1"], tmp.path())), 2);
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, SOLITON.replace("dt = 0.001", "dt = 0.001\ncadense = 1")).unwrap();
    let o = dnls(&["run", bad.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cadense"));
    let missing = tmp.path().join("none.csv");
    assert_eq!(code(&dnls(&["check-bootstrap", missing.to_str().unwrap(), "--a", "1", "--b", "0.1", "--theta", "2"], tmp.path())), 2);
}

#[test]
fn gn_constant_one_dimensional_cubic() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dnls(&["gn-constant", "--dim", "1", "--p", "3"], tmp.path());
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let k: f64 = text.lines().find_map(|l| l.strip_prefix("k = ")).unwrap().parse().unwrap();
    assert!((k - 1.0 / 3f64.sqrt()).abs() < 1e-3, "{text}");
}

#[test]
fn scattering_report_from_run_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SOLITON
        .replace("name = \"soliton\"", "name = \"damped\"\ndamping = \"constant:a=0.5\"")
        .replace("t_end = 1.0", "t_end = 6.0")
        .replace("dt = 0.001\ncadence = 0.01", "dt = 0.005\ncadence = 0.1")
        .replace("kind = \"soliton\"\neta = 1.0", "kind = \"gaussian\"\namplitude = 0.5\nwidth = 2.0")
        + "\n[scattering]\nsample_every = 0.5\nburn_in = 2.0\n";
    let cfg = tmp.path().join("damped.toml");
    std::fs::write(&cfg, text).unwrap();
    let runs = tmp.path().join("runs");
    let o = dnls(&["run", cfg.to_str().unwrap()], &runs);
    assert_ne!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let dir = runs.join("damped");
    assert!(dir.join("u_plus.dnls").exists());
    let reports = tmp.path().join("again");
    let o = dnls(&["scattering-report", dir.to_str().unwrap()], &reports);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(reports.join("scattering.txt").exists());
}
