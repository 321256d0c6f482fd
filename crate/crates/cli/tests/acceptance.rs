//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Budgets and tolerances are the defaults pinned in
//! `velopaoi_cli::validate`; tests share one validator so sweeps that several
//! criteria use are simulated once.

use std::io::Write;
use std::sync::OnceLock;

use velopaoi_cli::validate::{Budget, Validator};

fn validator() -> &'static Validator {
    static V: OnceLock<Validator> = OnceLock::new();
    V.get_or_init(|| {
        let budget = Budget::default();
        assert_eq!(budget.meta_trials, 100_000);
        assert_eq!(budget.handover_trials, 1_000_000);
        assert_eq!(budget.handover_velocities.len(), 5);
        assert_eq!(budget.rate_velocities.len(), 2);
        assert_eq!(budget.paoi_velocities.len(), 4);
        Validator::new(budget)
    })
}

fn check(id: usize) {
    let report = validator().criterion(id);
    // Bypasses libtest output capture so the line shows in every run.
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{report}");
    let _ = out.flush();
    assert!(report.passed(), "{report}");
}

#[test]
fn criterion_01_aerial_meta_distribution() {
    check(1);
}

#[test]
fn criterion_02_ground_meta_distribution() {
    check(2);
}

#[test]
fn criterion_03_threshold_distance_inversion() {
    check(3);
}

#[test]
fn criterion_04_residual_interference_closed_form() {
    check(4);
}

#[test]
fn criterion_05_handover_probability() {
    check(5);
}

#[test]
fn criterion_06_handover_rate() {
    check(6);
}

#[test]
fn criterion_07_correlation_endpoints() {
    check(7);
}

#[test]
fn criterion_08_aerial_below_ground_correlation() {
    check(8);
}

#[test]
fn criterion_09_joint_decorrelation() {
    check(9);
}

#[test]
fn criterion_10_peak_age_percentile() {
    check(10);
}

#[test]
fn criterion_11_special_functions() {
    check(11);
}

#[test]
fn criterion_12_degenerate_aerial_channel() {
    check(12);
}
