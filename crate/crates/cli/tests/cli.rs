use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn rof1d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rof1d")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

const FLOW: &str = r#"
name = "four-step"
task = "flow"
phi = [-1.0, 1.0]

[f]
length = 2.0
breakpoints = [0.5, 1.0, 1.5]
values = [0.0, -4.0, 4.0, 0.0]
"#;

#[test]
fn list_shows_every_preset() {
    let out = rof1d(&["list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("example-s4") && text.contains("instability-a"));
    assert!(text.lines().count() >= 9);
}

#[test]
fn four_step_preset_writes_terminal_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = rof1d(&["preset", "example-s4", "--k", "4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(&dir.path().join("u_T.csv")), "x_left,x_right,value\n0,1,-1\n1,2,1\n");
    let summary = read(&dir.path().join("summary.txt"));
    assert!(summary.contains("T_ext: 0.75\n"), "{summary}");
    assert!(summary.contains("T_ext exact: 3/4\n"));
    let events = read(&dir.path().join("events.csv"));
    assert!(events.starts_with("t,kind,detail\n0.25,boundary-hit,left\n"));
    assert!(!dir.path().join("finding.txt").exists());
}

#[test]
fn small_jump_preset_writes_finding() {
    let dir = tempfile::tempdir().unwrap();
    let out = rof1d(&["preset", "example-s4", "--k", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(&dir.path().join("u_T.csv")), "x_left,x_right,value\n0,1,-0.5\n1,2,0.5\n");
    let finding = read(&dir.path().join("finding.txt"));
    assert!(finding.contains("computed terminal state: step (-0.5, 0.5)"), "{finding}");
    assert!(finding.contains("stationarity certificate: verified"));
    assert!(read(&dir.path().join("summary.txt")).contains("T_ext: 0.125\n"));
}

#[test]
fn small_data_preset_reports_constant_minimizer() {
    let dir = tempfile::tempdir().unwrap();
    let out = rof1d(&["preset", "thm-4-2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(read(&dir.path().join("summary.txt")).contains("minimizer: constant 0\n"));
}

#[test]
fn suite_all_passes_quickly_with_plots() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let out = rof1d(&["preset", "suite-all", "--out", dir.path().to_str().unwrap(), "--svg"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(start.elapsed().as_secs_f64() < 30.0);
    for name in ["example-s4", "thm-4-1", "thm-4-2", "lemma-3-9-barriers", "threshold", "large-gap", "instability-a", "instability-b"] {
        let sub = dir.path().join(name);
        assert!(read(&sub.join("summary.txt")).contains(&format!("scenario: {name}\n")));
        assert!(read(&sub.join("plot.svg")).starts_with("<svg"));
    }
    let summary = read(&dir.path().join("summary.txt"));
    assert_eq!(summary.matches(": pass\n").count(), 8, "{summary}");
}

#[test]
fn empty_or_malformed_scenarios_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let empty = dir.path().join("empty.toml");
    fs::write(&empty, "").unwrap();
    let out = rof1d(&["run", empty.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, FLOW.replace("phi = [-1.0, 1.0]\n", "")).unwrap();
    let out = rof1d(&["run", bad.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("`phi`"));

    assert_eq!(code(&rof1d(&["preset", "nope", "--out", out_dir.to_str().unwrap()])), 2);
    assert_eq!(code(&rof1d(&["frobnicate"])), 2);
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("flow.toml");
    fs::write(&scenario, FLOW).unwrap();
    let outs: Vec<_> = ["a", "b"].iter().map(|d| dir.path().join(d)).collect();
    for o in &outs {
        let out = rof1d(&["run", scenario.to_str().unwrap(), "--out", o.to_str().unwrap(), "--rational"]);
        assert_eq!(code(&out), 0);
    }
    for file in ["f.csv", "u_T.csv", "events.csv", "summary.txt"] {
        assert_eq!(fs::read(outs[0].join(file)).unwrap(), fs::read(outs[1].join(file)).unwrap(), "{file}");
    }
    assert!(read(&outs[0].join("summary.txt")).contains("arithmetic: exact rational"));
}

#[test]
fn every_task_runs_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = "[f]\nlength = 2.0\nbreakpoints = [1.0]\nvalues = [2.0, 0.0]\n";
    let cases = [
        ("solve", format!("name = \"s\"\ntask = \"solve\"\nphi = [0.0, 0.0]\nlambda = 1.0\n{f}[options]\noracle = true\noracle_grid = 256\n"), "minimizer: constant 0"),
        ("attainment", format!("name = \"a\"\ntask = \"attainment\"\nphi = [2.0, 0.0]\nlambda = 2.0\n{f}"), "verdict TraceInheritance: pass"),
        ("threshold", format!("name = \"t\"\ntask = \"threshold\"\nphi = [0.0, 0.0]\n{f}"), "lambda_1: 1"),
        ("counterexample", format!("name = \"c\"\ntask = \"counterexample\"\nlambda = 1.0\n{f}[options]\nkind = \"large-gap\"\n"), "phi: (-3, 3)"),
        ("suite", "name = \"r\"\ntask = \"suite\"\n[options]\ncount = 20\nseed = 3\n".to_string(), "terminal minimizer: 20/20 passed"),
    ];
    for (name, text, expect) in cases {
        let path = dir.path().join(format!("{name}.toml"));
        fs::write(&path, text).unwrap();
        let out_dir = dir.path().join(name);
        let out = rof1d(&["run", path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let summary = read(&out_dir.join("summary.txt"));
        assert!(summary.contains(expect), "{name}: {summary}");
    }
    let suite = read(&dir.path().join("suite").join("summary.txt"));
    assert!(suite.contains(", 0 unverified"), "{suite}");
    let z = read(&dir.path().join("solve").join("z.csv"));
    assert!(z.starts_with("x,z\n"));
}
