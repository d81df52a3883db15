//! Scenario runner for the corotational blowup lab.

mod artifacts;
pub mod config;
pub mod criteria;
pub mod scenarios;

pub use artifacts::Artifacts;
pub use config::LabConfig;
pub use criteria::{criterion_name, run_criterion, Check, CRITERIA};
pub use scenarios::{criteria_for, run_scenario, Summary, SCENARIOS};

/// One status line per check.
pub fn format_check(c: &Check) -> String {
    format!("criterion {:02} {} {}: {}", c.criterion, if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)
}
