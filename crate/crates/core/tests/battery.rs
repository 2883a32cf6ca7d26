//! Runs the full verification battery at its default configuration and
//! requires every named check to pass.

use xshuffle_core::engine::{Engine, EngineCaps};
use xshuffle_core::oracle::{Oracle, OracleCaps};
use xshuffle_core::verify::{run_suite, Suite, VerifyConfig};

#[test]
fn full_battery_passes() {
    let oracle = Oracle::new(OracleCaps::default());
    let engine = Engine::new(EngineCaps::default());
    let cfg = VerifyConfig::default();
    let outcomes = run_suite(&oracle, &engine, Suite::All, &cfg);
    assert!(!outcomes.is_empty());
    let mut failures = Vec::new();
    for outcome in &outcomes {
        println!(
            "{} [{:>6} ms] {}: {}",
            if outcome.passed { "pass" } else { "FAIL" },
            outcome.millis,
            outcome.name,
            outcome.detail
        );
        if !outcome.passed {
            failures.push(outcome.name);
        }
    }
    assert!(failures.is_empty(), "failed checks: {failures:?}");
}
