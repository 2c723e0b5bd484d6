//! Prints one line per acceptance criterion and every failing row beneath it.
//! Pass `--quick` (after `--`) to skip the rows over primes `p ≥ 5` and large balls.

use std::process::ExitCode;
use std::time::Instant;

use polywythoff::selftest::{criterion, SelftestOptions, CRITERIA};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let opts = SelftestOptions {
        quick: args.iter().any(|a| a == "--quick"),
        large: args.iter().any(|a| a == "--large"),
        ..SelftestOptions::default()
    };
    if args.iter().any(|a| a == "--list") {
        for (n, name) in CRITERIA {
            println!("criterion_{n}: test  ({name})");
        }
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    for (n, name) in CRITERIA {
        let start = Instant::now();
        let rows = criterion(n, &opts);
        let passed = rows.iter().filter(|r| r.passed).count();
        let ok = passed == rows.len();
        println!(
            "criterion {n:>2} {}  {name}  ({passed}/{} checks, {:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            rows.len(),
            start.elapsed().as_secs_f64()
        );
        for r in rows.iter().filter(|r| !r.passed) {
            println!("    {r}");
        }
        failed += usize::from(!ok);
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
