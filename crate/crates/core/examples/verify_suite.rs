//! Run one property suite programmatically and print a line per check.
//!
//! `cargo run --example verify_suite -- gauge 7`

use laxflow::config::Tolerances;
use laxflow::verify::{verify_suite, Suite};

fn main() -> laxflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let suite: Suite = args.next().as_deref().unwrap_or("gauge").parse()?;
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let report = verify_suite(seed, suite, &Tolerances::resolve(None)?, true);
    for check in &report.checks {
        println!("{}  ({:.3} s)", check.line(), check.wall_time_s.unwrap_or(0.0));
    }
    println!("{} passed, {} failed", report.passed, report.failed);
    Ok(())
}
