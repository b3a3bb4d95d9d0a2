//! Criteria 1-10, one line each. Exits nonzero when any criterion fails.

use building_lab::verify::{run_criterion, VerifyConfig, CRITERIA};
use std::time::Instant;

fn main() {
    let cfg = VerifyConfig::default();
    let only: Option<u8> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (id, _) in CRITERIA.iter().filter(|c| only.is_none_or(|o| o == c.0)) {
        let t = Instant::now();
        let r = run_criterion(*id, &cfg);
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status} {} ({:.1}s)",
            r.id,
            r.title,
            t.elapsed().as_secs_f64()
        );
        if !r.passed {
            failed += 1;
            if let Some(e) = &r.error {
                println!("    error: {e}");
            }
            for c in r.checks.iter().filter(|c| !c.passed) {
                println!("    {}: {}", c.name, c.detail);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
