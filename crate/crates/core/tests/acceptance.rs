//! The eight acceptance criteria, one report line each.

use std::io::Write;

use curvecount::verify::{run_one, Options, Workbench, CRITERIA};

#[test]
fn acceptance_criteria() {
    let mut bench = Workbench::new();
    let opts = Options::default();
    let mut failed = Vec::new();
    // straight to the stream so the report shows without --nocapture
    let mut err = std::io::stderr().lock();
    writeln!(err).unwrap();
    for c in CRITERIA {
        let outcome = run_one(c.0, &mut bench, opts);
        writeln!(err, "{outcome}").unwrap();
        if !outcome.passed {
            failed.push(outcome.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
