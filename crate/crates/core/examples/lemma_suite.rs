//! Monte Carlo checks of the truncation-bias bound and the projection
//! variance inequality over 20 seeded configurations.

use dp_minimax::bench::lemma_property_suite;

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let report = lemma_property_suite(seed);
    for c in &report.checks {
        println!(
            "{:>2} {:<16} d={} k={:<3} bias {:.2e} <= {:.2e}   var {:.3e} <= {:.3e}   {}",
            c.index,
            c.kind,
            c.d,
            c.k,
            c.bias_norm,
            c.bias_bound,
            c.projected_variance,
            c.original_variance,
            if c.bias_ok && c.variance_ok {
                "ok"
            } else {
                "FAIL"
            }
        );
    }
    println!("all passed: {}", report.passed);
}
