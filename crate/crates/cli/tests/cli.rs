use serde_json::Value;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn tautrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tautrel"))
        .args(args)
        .env_remove("TAUTREL_BUDGET")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(format!("{name}.br"));
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = tautrel(&full);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (o.status.code().unwrap(), v)
}

#[test]
fn verify_b21() {
    let (code, v) = report(&["verify", "1", "2", "2,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["outcome"]["status"], "zero");
    assert!(!v["outcome"]["certificate"].as_array().unwrap().is_empty());
}

#[test]
fn verify_by_flags() {
    let o = tautrel(&["verify", "--g", "1", "--m", "2", "--d", "1,1,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("zero (WDVV certificate)"));
}

#[test]
fn verify_top_degree() {
    let o = tautrel(&["verify", "1", "2", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("integral vanishes"));
}

#[test]
fn verify_below_the_bound_warns_and_reports_nonzero() {
    let o = tautrel(&["verify", "1", "2", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(stdout(&o).contains("nonzero"));
}

#[test]
fn tiny_budget_is_reported_as_exceeded() {
    let (code, v) = report(&["verify", "1", "2", "1,1,1", "--budget", "5"]);
    assert_eq!(code, 2);
    assert_eq!(v["outcome"]["status"], "budget-exceeded");
}

#[test]
fn budget_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_tautrel"))
        .args(["verify", "1", "2", "1,1,1", "--format", "json"])
        .env("TAUTREL_BUDGET", "5")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["budget"]["max_relations"], 5);
}

#[test]
fn genus_zero_class_is_empty() {
    let o = tautrel(&["compute-b", "--g", "0", "--m", "2", "--d", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn raw_b21_has_seven_terms() {
    let (code, v) = report(&["compute-b", "1", "2", "2,1", "--stage", "raw"]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"]["terms"], 7);
    let latex = stdout(&tautrel(&["compute-b", "1", "2", "2,1", "--format", "latex"]));
    assert!(latex.contains(r"\rangle_{1}") && latex.contains(r"\Psi^{2}(U_{1})"));
}

#[test]
fn psi_free_stage_rejects_higher_genus() {
    assert_eq!(
        tautrel(&["compute-b", "2", "1", "4", "--stage", "psi-free"])
            .status
            .code(),
        Some(1)
    );
    let o = tautrel(&["compute-b", "1", "2", "2,1", "--stage", "psi-free"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("P("));
}

#[test]
fn unstable_parameters_fail() {
    assert_eq!(tautrel(&["compute-b", "0", "1", "1"]).status.code(), Some(1));
}

#[test]
fn pushforward_cases() {
    for args in [
        ["--g", "0", "--n", "2", "--m", "2", "--l", "1", "--d", "1,1"],
        ["--g", "1", "--n", "2", "--m", "2", "--l", "1", "--d", "2,1"],
        ["--g", "0", "--n", "2", "--m", "2", "--l", "2", "--d", "2,1"],
    ] {
        let mut full = vec!["check-pushforward"];
        full.extend(args);
        let (code, v) = report(&full);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(v["outcome"]["equal"], true);
    }
}

#[test]
fn enumerate_counts() {
    let (_, v) = report(&["enumerate", "--g", "1", "--n", "2", "--m", "2"]);
    assert_eq!(v["outcome"]["count"], 8);
    let (_, v) = report(&["enumerate", "--g", "1", "--n", "1", "--m", "2"]);
    let one_vertex = v["outcome"]["shapes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["vertices"] == 1)
        .count();
    assert_eq!(one_vertex, 1);
    let (_, v) = report(&["enumerate", "--g", "0", "--n", "1", "--m", "2"]);
    for s in v["outcome"]["shapes"].as_array().unwrap() {
        assert_eq!(s["edges"].as_u64().unwrap() + 1, s["vertices"].as_u64().unwrap());
    }
    let (_, v) = report(&["enumerate", "--g", "1", "--n", "2", "--m", "2", "--with-extras", "2,1"]);
    assert_eq!(v["outcome"]["contributing"], 6);
    assert_eq!(v["outcome"]["assignments"], 6);
}

#[test]
fn reduce_fixtures() {
    for name in ["f", "i1", "h1", "h0_v12_i0"] {
        let o = tautrel(&["reduce", &fixture(name), "--mode", "zero-test"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}

#[test]
fn reduce_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tautrel"))
        .args(["reduce", "-", "--mode", "psi"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"<P(U1) U2 U3 U4>_0").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim().matches("<").count(), 2);
}

#[test]
fn reduce_pairings() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "<U1 U2 g>_0 <g* U3 U4 U5>_0").unwrap();
    let (code, v) = report(&["reduce", file.path().to_str().unwrap(), "--mode", "pair"]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"]["pairings"].as_array().unwrap().len(), 5);
    assert_eq!(v["outcome"]["all_zero"], false);
}

#[test]
fn parse_errors_carry_a_position() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "<U1 U2 U3>_0 + <U1 U2").unwrap();
    let o = tautrel(&["reduce", file.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column"));
}

#[test]
fn reports_are_deterministic() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing_ms");
        serde_json::to_string(&v).unwrap()
    };
    for args in [
        &["verify", "1", "2", "2,1"][..],
        &["enumerate", "--g", "1", "--n", "2", "--m", "2"][..],
    ] {
        let a = strip(report(args).1);
        let b = strip(report(&[args, &["--threads", "4"]].concat()).1);
        assert_eq!(a, b);
    }
}
