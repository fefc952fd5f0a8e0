//! Acceptance criteria A1-A8, one line per criterion.

use std::process::ExitCode;

use cluster_core::acceptance;

fn main() -> ExitCode {
    let outcomes = acceptance::all();
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
