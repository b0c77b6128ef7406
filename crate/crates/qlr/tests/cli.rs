use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn qlr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlr")).args(args).output().expect("run qlr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn opt_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.qasm");
    let o = qlr(&["opt", fixture("fig4a.qasm").to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let got = std::fs::read_to_string(out).unwrap();
    let golden = std::fs::read_to_string(fixture("fig4d.qasm")).unwrap();
    assert_eq!(got, golden);
}

#[test]
fn opt_reproduces_measurement_example() {
    let o = qlr(&["opt", fixture("fig1.qasm").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), std::fs::read_to_string(fixture("fig1b.qasm")).unwrap());
}

#[test]
fn fixture_outputs_are_fixed_points() {
    for name in ["fig1.qasm", "fig4a.qasm"] {
        let first = stdout(&qlr(&["opt", fixture(name).to_str().unwrap()]));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("once.qasm");
        std::fs::write(&path, &first).unwrap();
        let second = stdout(&qlr(&["opt", path.to_str().unwrap()]));
        assert_eq!(first, second, "{}", name);
    }
}

#[test]
fn analyze_compare_optimized_fig4() {
    let o = qlr(&["analyze", fixture("fig4a.qasm").to_str().unwrap(), "--compare-optimized"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# layered model, durations in τu (1q = 1, 2q = 2, m = 15)"));
    let row: Vec<&str> = text.lines().nth(2).unwrap().split_whitespace().collect();
    assert_eq!(&row[..6], ["fig4a", "16", "11", "8", "11", "7"]);
    let q1: Vec<&str> = text.lines().find(|l| l.starts_with("q[1] ")).unwrap().split_whitespace().collect();
    assert_eq!(q1, ["q[1]", "11", "5"]);
}

#[test]
fn analyze_formats_share_field_names() {
    let path = fixture("fig4a.qasm");
    let p = path.to_str().unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&qlr(&["analyze", p, "--compare-optimized", "--format", "json"]))).unwrap();
    assert_eq!(json["exec_before"], 11);
    assert_eq!(json["exec_after"], 8);
    let csv = stdout(&qlr(&["analyze", p, "--compare-optimized", "--format", "csv"]));
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, ["workload", "qubits", "exec_before", "exec_after", "longest_before", "longest_after", "avg_before", "avg_after"]);
    let values: Vec<&str> = lines.next().unwrap().split(',').collect();
    for (k, v) in header.iter().zip(values) {
        assert_eq!(json[*k].to_string().trim_matches('"'), v, "{}", k);
    }
}

#[test]
fn analyze_serial_model_fig1() {
    let p = fixture("fig1.qasm");
    for (m, before, after) in [("15", "33", "18"), ("50", "103", "53")] {
        let o = qlr(&["analyze", p.to_str().unwrap(), "--compare-optimized", "--model", "serial", "--measure-cost", m]);
        let text = stdout(&o);
        assert!(text.contains(&format!("m = {}", m)));
        let a1: Vec<&str> = text.lines().find(|l| l.starts_with("a[1] ")).unwrap().split_whitespace().collect();
        assert_eq!(a1, ["a[1]", before, after]);
    }
}

#[test]
fn analyze_single_and_against() {
    let a = fixture("fig4a.qasm");
    let d = fixture("fig4d.qasm");
    let single = stdout(&qlr(&["analyze", a.to_str().unwrap(), "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&single).unwrap();
    assert_eq!((v["execution_time"].as_u64(), v["depth"].as_u64()), (Some(11), Some(7)));
    let pair = stdout(&qlr(&["analyze", a.to_str().unwrap(), "--against", d.to_str().unwrap(), "--format", "csv"]));
    assert!(pair.lines().nth(1).unwrap().starts_with("fig4a,16,11,"));
}

#[test]
fn verify_same_program() {
    let p = fixture("fig4d.qasm");
    let p = p.to_str().unwrap();
    let o = qlr(&["verify", p, p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("equivalent"));
}

#[test]
fn verify_detects_difference() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.qasm");
    let x = dir.path().join("x.qasm");
    std::fs::write(&h, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nh q[0];\n").unwrap();
    std::fs::write(&x, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nx q[0];\n").unwrap();
    let o = qlr(&["verify", h.to_str().unwrap(), x.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("not equivalent"));
}

#[test]
fn verify_rejects_measurements() {
    let p = fixture("fig1.qasm");
    let o = qlr(&["verify", p.to_str().unwrap(), p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("measurement"));
}

#[test]
fn parse_error_reports_file_line_col() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qasm");
    std::fs::write(&bad, "OPENQASM 2.0;\nqreg q[2];\ncx q[0],r[1];\n").unwrap();
    let o = qlr(&["parse", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains(&format!("{}:3:9:", bad.display())), "{}", err);
    assert!(err.contains("undeclared register `r`"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qlr(&["opt"]).status.code(), Some(2));
    assert_eq!(qlr(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qlr(&["bench", "--measure-cost", "0"]).status.code(), Some(2));
    assert_eq!(qlr(&["analyze", "x.qasm", "--model", "quantum"]).status.code(), Some(2));
}

#[test]
fn missing_file_exits_one() {
    let o = qlr(&["parse", "/nonexistent/file.qasm"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reads_standard_input() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_qlr"))
        .args(["parse", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"qreg q[2]; h q; CX q[0],q[1];").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("qreg q[2];\nh q[0];\nh q[1];\nCX q[0],q[1];\n"));
}

#[test]
fn layers_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let p = fixture("fig4a.qasm");
    let o = qlr(&["layers", p.to_str().unwrap(), "--transformed", "--dot", dot.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 5);
    assert!(std::fs::read_to_string(dot).unwrap().starts_with("digraph"));
    let before = stdout(&qlr(&["layers", p.to_str().unwrap()]));
    assert_eq!(before.lines().count(), 7);
}

#[test]
fn gen_writes_file_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iqft.qasm");
    let o = qlr(&["gen", "--kind", "iqft", "--n", "16", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("h ") || l.starts_with("cu1")).count(), 16 + 120);
    let a = stdout(&qlr(&["gen", "--kind", "random", "--n", "5", "--seed", "9"]));
    let b = stdout(&qlr(&["gen", "--kind", "random", "--n", "5", "--seed", "9"]));
    assert_eq!(a, b);
    assert_eq!(qlr(&["gen", "--kind", "qft", "--n", "0"]).status.code(), Some(1));
}

#[test]
fn pipeline_output_is_byte_identical_across_runs() {
    let p = fixture("fig4a.qasm");
    for args in [vec!["opt"], vec!["analyze", "--compare-optimized", "--format", "json"], vec!["layers"]] {
        let mut full = args.clone();
        full.insert(1, p.to_str().unwrap());
        assert_eq!(qlr(&full).stdout, qlr(&full).stdout);
    }
    assert_eq!(qlr(&["bench", "--sizes", "4,8,16"]).stdout, qlr(&["bench", "--sizes", "4,8,16"]).stdout);
}
