//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! report is always printed.

use std::process::ExitCode;

use morita_core::suite::{run_suite, DEFAULT_SEED};

fn main() -> ExitCode {
    println!("acceptance suite (seed {DEFAULT_SEED})");
    let reports = run_suite(DEFAULT_SEED, |r, elapsed| println!("{r} ({:.1?})", elapsed));
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", reports.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
