use germoid::experiments::{run_cross, run_diagnose, run_finite, run_star, ExperimentReport, Outcome};
use germoid::par::Execution;

fn strip_time(mut r: ExperimentReport) -> ExperimentReport {
    r.wall_time_ms = 0.0;
    r
}

#[test]
fn reports_round_trip_through_json() {
    for r in [
        run_cross(5, 1, Execution::Sequential).unwrap(),
        run_star(4, "(1 2)", 3, 1).unwrap(),
        run_star(3, "(1 2)", 3, 1).unwrap(),
        run_finite(r#"{"transformation": {"points": 3, "group_generators": ["(1 2 3)"]}}"#, 10, 1, Execution::Sequential)
            .unwrap(),
    ] {
        let back = ExperimentReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}

#[test]
fn reports_do_not_depend_on_execution_mode() {
    let a = run_cross(30, 8, Execution::Sequential).unwrap();
    let b = run_cross(30, 8, Execution::Parallel).unwrap();
    assert_eq!(strip_time(a), strip_time(b));
    let spec = r#"{"equivalence": {"points": 3, "classes": [[1, 2, 3]]}}"#;
    let a = run_finite(spec, 40, 8, Execution::Sequential).unwrap();
    let b = run_finite(spec, 40, 8, Execution::Parallel).unwrap();
    assert_eq!(strip_time(a), strip_time(b));
}

#[test]
fn outcomes_and_exit_codes() {
    assert_eq!(run_cross(0, 1, Execution::Sequential).unwrap().outcome, Outcome::Pass);
    let low = run_star(3, "(1 2)", 0, 1).unwrap();
    assert_eq!(low.outcome.exit_code(), 2);
    assert!(low.obstruction.unwrap().contains("n < 4"));
    assert!(run_star(1, "()", 0, 1).is_err());
    let diag = run_diagnose(r#"{"n": 4, "group": "Z4"}"#).unwrap();
    assert!(diag.check("Hausdorff").unwrap().observed);
    assert!(run_diagnose(r#"{"n": 5, "group": "A4"}"#).is_err());
}

#[test]
fn cross_reports_f_squared() {
    let r = run_cross(0, 1, Execution::Sequential).unwrap();
    assert!(r.check("f*f = 4f").unwrap().observed);
    assert_eq!(r.witnesses["lambda_table"], serde_json::json!(["1", "-1", "-1", "1"]));
}
