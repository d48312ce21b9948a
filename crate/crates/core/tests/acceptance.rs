//! Acceptance criteria A1–A9. Each test prints one PASS/FAIL line.

use std::sync::OnceLock;

use minkflow::acceptance::{AcceptanceOptions, CriterionResult, Suite};

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(|| Suite::new(AcceptanceOptions::default()))
}

fn report(result: CriterionResult) {
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn a1_euclidean_reduction() {
    report(suite().a1());
}

#[test]
fn a2_area_law() {
    report(suite().a2());
}

#[test]
fn a3_length_law() {
    report(suite().a3());
}

#[test]
fn a4_isoperimetric_convergence() {
    report(suite().a4());
}

#[test]
fn a5_identity_suite() {
    report(suite().a5());
}

#[test]
fn a6_inequality_suite() {
    report(suite().a6());
}

#[test]
fn a7_conservation_and_monotonicity() {
    report(suite().a7());
}

#[test]
fn a8_frame_velocity() {
    report(suite().a8());
}

#[test]
fn a9_offset_laws() {
    report(suite().a9());
}
