use symbolkit::pools::DEFAULT_SEED;
use symbolkit::verify::{run_criterion, SUITES};

fn main() {
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (id, suite, _) in SUITES {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let r = run_criterion(id, DEFAULT_SEED);
        let detail: Vec<String> = r.checks.iter().map(|c| format!("{} [{}] {}", if c.pass { "ok" } else { "FAILED" }, c.label, c.detail)).collect();
        println!("{} criterion {id} ({suite}, {:.1} s)", if r.pass { "PASS" } else { "FAIL" }, r.seconds);
        for d in detail {
            println!("    {d}");
        }
        if !r.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
