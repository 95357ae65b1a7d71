//! Runs the named verification checks and prints one line per check.
//!
//! Run with `cargo run --release --example verify_report`.

use su11::verify::{run, VerifySettings};

fn main() -> su11::Result<()> {
    let report = run(&VerifySettings::default())?;
    for check in &report.checks {
        println!("{}", check.line());
    }
    std::process::exit(if report.passed() { 0 } else { 1 });
}
