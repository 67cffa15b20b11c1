//! Runs the full acceptance suite and prints one line per criterion.

use std::process::ExitCode;

use semistream::acceptance::run_suite;

fn main() -> ExitCode {
    let reports = run_suite(&[]).unwrap();
    for r in &reports {
        println!("{}", r.line());
    }
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed", reports.len(), reports.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
