use std::path::PathBuf;
use std::process::{Command, Output};

fn germoid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_germoid"))
        .args(args)
        .env_remove("GERMOID_SEED")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp_json(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("germoid-cli-{tag}-{}.json", std::process::id()))
}

#[test]
fn cross_default_passes() {
    let o = germoid(&["cross", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("f*f = 4f: true"));
}

#[test]
fn cross_without_random_trials() {
    let o = germoid(&["cross", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn star_n4_transposition() {
    let path = tmp_json("star");
    let o = germoid(&["star", "--n", "4", "--tau", "(1 2)", "--trials", "10", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = germoid::experiments::ExperimentReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(!report.check("supp′(u) is a bisection").unwrap().observed);
    assert!(report.check("u* h u = h∘τ for random h").unwrap().observed);
}

#[test]
fn star_n3_is_an_obstruction() {
    let o = germoid(&["star", "--n", "3", "--tau", "(1 2)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("not true for n < 4"));
    assert!(stdout(&o).contains("dimension 3"));
}

#[test]
fn star_identity_gives_unit() {
    let o = germoid(&["star", "--n", "4", "--tau", "()", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("u is the unit: true"));
}

#[test]
fn malformed_tau_is_an_error() {
    let o = germoid(&["star", "--tau", "(1 2 3)(1 2)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("repeated"));
}

#[test]
fn finite_controls() {
    let o = germoid(&["finite", "--spec", &data("z3.json"), "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("(B) nonzero ideals meet the diagonal: true"));
    let o = germoid(&["finite", "--spec", &data("z2.json"), "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("(A) faithful on the diagonal implies faithful: false"));
    assert!(out.contains("(B) nonzero ideals meet the diagonal: false"));
    assert!(out.contains("essentially principal: false"));
}

#[test]
fn diagnose_a4() {
    let o = germoid(&["diagnose", "--spec", &data("a4.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Hausdorff: false"));
    assert!(stdout(&o).contains("essentially principal: true"));
}

#[test]
fn spec_errors_report_position() {
    let o = germoid(&["diagnose", "--spec", &data("bad.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, column"));
}

#[test]
fn seeds_make_reports_deterministic() {
    let run = |seed: &str, tag: &str| {
        let path = tmp_json(tag);
        let o = Command::new(env!("CARGO_BIN_EXE_germoid"))
            .args(["cross", "--trials", "10", "--json", path.to_str().unwrap()])
            .env("GERMOID_SEED", seed)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        let mut r = germoid::experiments::ExperimentReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
        std::fs::remove_file(&path).ok();
        r.wall_time_ms = 0.0;
        r
    };
    let a = run("77", "a");
    assert_eq!(a.seed, Some(77));
    assert_eq!(a, run("77", "b"));
}

#[test]
fn selftest_passes() {
    let o = germoid(&["selftest", "--sequential"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
