use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn okounkov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_okounkov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(cmd: &str, problem: &str, extra: &[&str]) -> Output {
    let path = fixture(problem);
    let mut args = vec![cmd, "--input", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    okounkov(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn body_of_the_cusp_and_conic() {
    let o = run("body", "cusp.problem", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"segment [0/1, 3/1]\""));
    let o = run("body", "veronese.problem", &["--d", "1"]);
    assert!(stdout(&o).contains("\"segment [0/1, 2/1]\""));
}

#[test]
fn malformed_file_exits_2_with_position() {
    let dir = std::env::temp_dir().join(format!("okounkov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.problem");
    std::fs::write(&bad, "n = 1\ngenerators = [\"1\", \"u1^\"]\n").unwrap();
    let o = okounkov(&["body", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
    let o = okounkov(&["body", "--input", dir.join("absent").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn degenerate_tables() {
    let o = run("degenerate", "cusp.problem", &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\"strict_inclusion\": true"));
    let o = run("verify", "even.problem", &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn missing_basis_element_exits_3() {
    let o = run("degenerate", "cusp_missing.problem", &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("value 3"));
    assert_eq!(run("khovanskii", "cusp_missing.problem", &[]).status.code(), Some(3));
    assert_eq!(run("khovanskii", "cusp.problem", &[]).status.code(), Some(0));
}

#[test]
fn quantize_writes_trace() {
    let dir = std::env::temp_dir().join(format!("okounkov-q-{}", std::process::id()));
    let o = run("quantize", "segre.problem", &["--out", dir.to_str().unwrap(), "--resolution", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no interior Bohr-Sommerfeld points"));
    let csv = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    assert!(csv.starts_with("s,t_of_s,m1,m2,mass_outside,pairing_tau_1,pairing_tau_2,max_affinity"));
    let o = run("quantize", "even.problem", &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_output() {
    let a = run("quantize", "cusp.problem", &["--threads", "1", "--resolution", "50"]);
    let b = run("quantize", "cusp.problem", &["--threads", "3", "--resolution", "50"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("s0 not found"));
    let a = run("semigroup", "segre.problem", &["--threads", "1"]);
    let b = run("semigroup", "segre.problem", &["--threads", "4"]);
    assert_eq!(a.stdout, b.stdout);
}
