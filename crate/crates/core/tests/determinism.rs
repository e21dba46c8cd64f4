//! Deterministic runs are bit-reproducible.

use psph::scenario::run::{run_with, RunOptions};
use psph::scenario::ScenarioSpec;

fn audit_of_short_branching_run() -> String {
    let mut spec = ScenarioSpec::preset("branching").unwrap();
    spec.dp = 1e-3;
    spec.t_end = 4e-6;
    let dir = tempfile::tempdir().unwrap();
    let options = RunOptions {
        deterministic: true,
        snapshots: false,
    };
    run_with(&spec, dir.path(), options).unwrap();
    std::fs::read_to_string(dir.path().join("audit.csv")).unwrap()
}

#[test]
fn repeated_deterministic_runs_match_bitwise() {
    let a = audit_of_short_branching_run();
    let b = audit_of_short_branching_run();
    assert!(a.lines().count() > 2);
    assert_eq!(a, b);
}
