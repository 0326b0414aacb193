//! Run the complete cross-verification battery: every closed form in the
//! crate against independent brute-force enumeration or an exact identity.
//! Exits nonzero if anything disagrees.

use particle_stats::oracle::{run_verification_suite, VerifyConfig};

fn main() {
    let report = run_verification_suite(&VerifyConfig::default());
    println!(
        "{:<42} {:>6} {:>12} {:>12} {:>9}",
        "check", "status", "abs err", "tolerance", "terms"
    );
    for c in &report.checks {
        let status = if c.skipped {
            "skip"
        } else if c.passed {
            "pass"
        } else {
            "FAIL"
        };
        println!(
            "{:<42} {status:>6} {:>12.3e} {:>12.1e} {:>9}",
            c.name, c.abs_err, c.tolerance, c.terms
        );
    }
    let failed = report.failures().len();
    println!("\n{} checks, {failed} failures", report.checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
