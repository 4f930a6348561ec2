//! The fourteen acceptance checks at their default tolerances. Prints one
//! PASS/FAIL line per check, then the failing measurements, and exits
//! non-zero if any check fails.

use std::process::ExitCode;

use laxflow::config::Tolerances;
use laxflow::verify::{run_check, Status, CHECKS};

const SEED: u64 = 42;

fn main() -> ExitCode {
    let tol = Tolerances::default();
    let results: Vec<_> = CHECKS
        .iter()
        .map(|(c, _, _)| run_check(*c, SEED, &tol).expect("known check"))
        .collect();

    println!("\nacceptance checks (seed {SEED}, default tolerances)");
    for res in &results {
        println!("{}", res.line());
    }
    let failed: Vec<_> = results.iter().filter(|r| r.status != Status::Pass).collect();
    for res in &failed {
        println!("\n{}:", res.name);
        for part in res.parts.iter().filter(|p| !p.pass) {
            let err = part.error.as_deref().map(|e| format!(" [{e}]")).unwrap_or_default();
            println!("    {}: {:.3e} (tol {:.1e}){err}", part.label, part.value, part.tolerance);
        }
    }
    println!("\n{} passed, {} failed\n", results.len() - failed.len(), failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
