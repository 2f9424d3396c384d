//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use tftlab::verify::{run_criterion, SuiteConfig, CRITERIA};

/// Each suite must finish within this budget.
const SUITE_SECONDS: f64 = 60.0;

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let mut failures = 0;
    for id in 1..=CRITERIA.len() {
        let start = Instant::now();
        let verdict = run_criterion(id, &cfg);
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs <= SUITE_SECONDS;
        println!("{verdict} [{secs:.1}s]");
        if !in_time {
            println!("FAIL {id:>2} ran {secs:.1}s, budget {SUITE_SECONDS}s");
        }
        if !verdict.passed() || !in_time {
            failures += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        CRITERIA.len() - failures,
        CRITERIA.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
