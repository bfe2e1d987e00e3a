//! Runs every named verification suite and requires a clean report.
//!
//! One test per suite so failures and runtimes are attributable. Witness
//! strings from failing checks are surfaced through the panic message.

use polydiff::verify::{run_suite, Status, SuiteConfig};

fn assert_suite_clean(name: &str) {
    let cfg = SuiteConfig::default();
    let report = run_suite(name, &cfg).expect("registered suite");
    let mut lines = Vec::new();
    for check in &report.checks {
        let tag = match check.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
        };
        lines.push(format!("  [{tag}] {}: {}", check.anchor, check.witness));
    }
    println!("suite {name}:\n{}", lines.join("\n"));
    assert!(
        report.all_passed(),
        "suite {name} reported failures:\n{}",
        lines.join("\n")
    );
    assert!(
        report.skipped() == 0,
        "suite {name} skipped checks:\n{}",
        lines.join("\n")
    );
}

#[test]
fn shuffle_suite() {
    assert_suite_clean("shuffle");
}

#[test]
fn realization_suite() {
    assert_suite_clean("realization");
}

#[test]
fn residues_suite() {
    assert_suite_clean("residues");
}

#[test]
fn mixed_suite() {
    assert_suite_clean("mixed");
}

#[test]
fn insertion_suite() {
    assert_suite_clean("insertion");
}

#[test]
fn module_suite() {
    assert_suite_clean("module");
}

#[test]
fn moebius_suite() {
    assert_suite_clean("moebius");
}

#[test]
fn casimir_suite() {
    assert_suite_clean("casimir");
}

#[test]
fn connection_suite() {
    assert_suite_clean("connection");
}

#[test]
fn gamma_suite() {
    assert_suite_clean("gamma");
}

#[test]
fn level_suite() {
    assert_suite_clean("level");
}
