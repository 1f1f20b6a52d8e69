//! Runs the analytic identity suite and prints each identity with its
//! largest relative residual.
//!
//!     cargo run --example identities

use kleinflow::identities::{run_identities, IdentityOptions};

fn main() -> kleinflow::Result<()> {
    let checks = run_identities(&IdentityOptions::default())?;
    for c in &checks {
        println!(
            "{:4}  {:<40} n={:3}  max residual {:.2e}",
            if c.passed() { "ok" } else { "FAIL" },
            c.name,
            c.samples,
            c.max_residual
        );
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} of {} identities hold", checks.len() - failed, checks.len());
    Ok(())
}
