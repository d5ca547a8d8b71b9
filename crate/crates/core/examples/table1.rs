//! Risk-versus-n exponents and dimension ratios for the three truncated-mean
//! configurations. Pass a replication count as the first argument (default 200).

use dp_minimax::bench::{table1_report, Table1Config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reps = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(200);
    let cfg = Table1Config {
        reps,
        ..Table1Config::default()
    };
    let report = table1_report(&cfg, 2024)?;
    for c in &report.checks {
        println!(
            "{:<20} {:<26} theory {:>6.2} measured {:>8.3} [{:.2}, {:.2}] {}",
            c.row,
            c.quantity,
            c.theory,
            c.measured,
            c.lower,
            c.upper,
            if c.agrees { "ok" } else { "off" }
        );
    }
    Ok(())
}
