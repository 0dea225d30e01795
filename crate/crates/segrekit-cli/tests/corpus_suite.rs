//! End-to-end runs of the built-in suite: verdict content, degree gating,
//! and byte-level determinism of the report.

use segrekit_cli::corpus::corpus_report;
use segrekit_cli::report::Status;

#[test]
fn full_suite_passes_at_degree_eight() {
    let report = corpus_report(8, 0, 8);
    println!("{}", report.render_text());
    assert!(report.all_pass, "some corpus case failed:\n{}", report.render_text());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = corpus_report(6, 42, 8).to_json();
    let b = corpus_report(6, 42, 8).to_json();
    assert_eq!(a, b, "same settings must give identical bytes");
}

#[test]
fn low_degree_yields_insufficient_cap_not_wrong_answers() {
    let report = corpus_report(4, 0, 8);
    assert!(!report.all_pass, "gated cases must count as not passing");
    let six = report
        .cases
        .iter()
        .find(|c| c.name == "six_circle")
        .expect("six_circle case is always listed");
    assert!(six
        .records
        .iter()
        .all(|r| r.status == Status::InsufficientCap));
    let lewy = report.cases.iter().find(|c| c.name == "lewy").unwrap();
    assert!(lewy.records.iter().all(|r| r.status == Status::Pass));
}
