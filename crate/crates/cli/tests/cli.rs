use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use multidep::channels::KrausChannel;
use multidep::dependence::DependenceReport;
use multidep::formats::{write_dmat, write_kraus};
use multidep::DensityOperator;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multidep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn report(args: &[&str]) -> DependenceReport {
    let mut full = vec!["--format", "json", "compute"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    DependenceReport::from_json(&stdout(&out)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn ghz_has_unit_dependence() {
    let r = report(&["--state", "ghz:N=3,d=2"]);
    assert_eq!((r.num_parties, r.local_dim), (3, 2));
    assert_eq!(r.pair_values.len(), 3);
    assert!((r.value - 1.0).abs() < 1e-9);
}

#[test]
fn parity_distribution_has_unit_dependence() {
    let r = report(&["--state", "pdist:P_even"]);
    assert!((r.value - 1.0).abs() < 1e-9);
}

#[test]
fn product_state_file_has_zero_dependence() {
    let dir = tempfile::tempdir().unwrap();
    let rho = DensityOperator::maximally_mixed(3, 2).unwrap();
    let file = write(dir.path(), "mixed.dmat", &write_dmat(&rho));
    let r = report(&["--state", &format!("dmat:@{file}")]);
    assert!(r.value.abs() < 1e-9);
}

#[test]
fn k_dependence_and_csv() {
    let out = run(&["--format", "csv", "compute", "--state", "ghz:N=4,d=2", "--k", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().contains("cmi"), "{text}");
}

#[test]
fn damping_channel_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "ad.kraus", &write_kraus(&KrausChannel::amplitude_damping_half()));
    let before = report(&["--state", "pdist:AD_example"]).value;
    let after = report(&["--state", "pdist:AD_example", "--apply", &format!("0:@{file}")]).value;
    assert!((before - 0.0613).abs() < 5e-4, "{before}");
    assert!((after - 0.1681).abs() < 5e-4, "{after}");
}

#[test]
fn output_is_deterministic() {
    let args = ["--format", "json", "measure-opt", "--state", "dicke:N=3,e=1", "--restarts", "4"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unreadable_input_exits_2() {
    assert_eq!(run(&["compute", "--state", "nonsense:1"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--state", "dmat:@/no/such/file.dmat"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "bad.dmat", "DMAT v1 N=1 d=2\n1,0 0,0\n");
    assert_eq!(run(&["compute", "--state", &format!("dmat:@{file}")]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn invalid_state_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // Parses, but the trace is 2.
    let file = write(dir.path(), "trace2.dmat", "DMAT v1 N=1 d=2\n1,0 0,0\n0,0 1,0\n");
    assert_eq!(run(&["compute", "--state", &format!("dmat:@{file}")]).status.code(), Some(3));
    assert_eq!(run(&["compute", "--state", "ghz:N=1,d=2"]).status.code(), Some(3));
}

#[test]
fn tables_pass() {
    let out = run(&["table"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn bounds_suite_passes() {
    let out = run(&["verify", "--suite", "bounds", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn damping_suite_reports_the_unreached_value() {
    let out = run(&["verify", "--suite", "ad-example"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn secret_share_runs() {
    let out = run(&["--format", "json", "secret-share", "--shares", "3,4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(value.is_array() || value.is_object());
}
