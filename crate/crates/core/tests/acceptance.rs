//! Acceptance suite: one test per core criterion, each printing a single
//! pass/fail line. Run with `cargo test -p doilab-core --test acceptance
//! -- --nocapture` to see the lines and timings.

use doilab_core::suite::{self, CheckReport, SuiteConfig};

fn run(check: impl FnOnce(&SuiteConfig) -> CheckReport) {
    let cfg = SuiteConfig::default();
    let report = check(&cfg);
    println!("acceptance {}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_01_commutator_identity() {
    run(suite::c01_commutator_identity);
}

#[test]
fn criterion_02_factorization() {
    run(suite::c02_factorization);
}

#[test]
fn criterion_03_symbol_oracles() {
    run(suite::c03_symbol_oracles);
}

#[test]
fn criterion_04_region_identity() {
    run(suite::c04_region_identity);
}

#[test]
fn criterion_05_transference() {
    run(suite::c05_transference);
}

#[test]
fn criterion_06_discretization_convergence() {
    run(suite::c06_discretization_convergence);
}

#[test]
fn criterion_07_exponential_bound_and_mollification() {
    run(suite::c07_exponential_bound_and_mollification);
}

#[test]
fn criterion_08_block_reduction() {
    run(suite::c08_block_reduction);
}

#[test]
fn criterion_09_constant_trends() {
    run(suite::c09_constant_trends);
}

#[test]
fn criterion_10_weak_type() {
    run(suite::c10_weak_type);
}
