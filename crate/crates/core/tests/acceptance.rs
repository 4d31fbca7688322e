//! Acceptance criteria 1 to 9, one PASS/FAIL line each.
//!
//! Each criterion runs its registered experiments at full budget and must
//! also finish within its time limit.

use heatbounds::verify::{self, RunOptions, Status};
use std::time::{Duration, Instant};

const SEED: u64 = 7;

const LIMITS: [(u8, &str, u64); 9] = [
    (1, "closed forms vs quadrature", 1),
    (2, "minimization consistency", 5),
    (3, "uniform bound sharpness on the line", 30),
    (4, "Dirichlet gradients and boundary equality", 120),
    (5, "Neumann gradients and convex reduction", 60),
    (6, "eigenfunction ratios", 1),
    (7, "isoperimetric lower bound", 1),
    (8, "spectral scaling", 10),
    (9, "stochastic invariants", 120),
];

#[test]
fn acceptance_criteria() {
    let mut failures = Vec::new();
    for (n, title, secs) in LIMITS {
        let suite = format!("criterion-{n}");
        let start = Instant::now();
        let report = verify::run(&[suite.as_str()], SEED, RunOptions::default()).expect("criterion has experiments");
        let elapsed = start.elapsed();
        let within = elapsed <= Duration::from_secs(secs);
        let failed: Vec<String> = report
            .experiments
            .iter()
            .filter(|e| e.status != Status::Pass)
            .map(|e| match &e.error {
                Some(err) => format!("{} ({err})", e.id),
                None => format!("{} (measured {:.6}, bound {:.6}, margin {:.3e})", e.id, e.measured, e.bound, e.margin),
            })
            .collect();
        let ok = report.passed && within;
        println!(
            "{} criterion {n}: {title} [{} experiments, {:.2} s of {secs} s]{}",
            if ok { "PASS" } else { "FAIL" },
            report.experiments.len(),
            elapsed.as_secs_f64(),
            if failed.is_empty() { String::new() } else { format!(" failing: {}", failed.join("; ")) }
        );
        for e in &report.experiments {
            println!("    {:<30} {:?} measured {:.6} bound {:.6} se {:?}", e.id, e.status, e.measured, e.bound, e.se);
        }
        if !ok {
            failures.push(n);
        }
    }
    assert!(failures.is_empty(), "failing criteria: {failures:?}");
}
