//! Turn intensities into horizon forecasts with the matrix exponential,
//! and cross-check against the independent uniformization series.
//!
//! ```bash
//! cargo run --example transition_probabilities
//! ```

use multistate::{transition_probability_matrix, uniformization_oracle, GeneratorMatrix};

fn main() -> multistate::Result<()> {
    // Single-house intensities: slow escape from low yield, a fluid middle
    // state, and a high state that almost never drops back.
    let q = GeneratorMatrix::from_rates(
        3,
        &[(1, 2, 0.005), (2, 1, 0.021), (2, 3, 0.022), (3, 2, 1e-9)],
    )?;

    for t in [7.0, 30.0] {
        let p = transition_probability_matrix(&q, t)?;
        println!("state distribution after {t:.0} days (rows: state today):");
        for r in 1..=3 {
            let row: Vec<String> = (1..=3)
                .map(|s| format!("{:>6.1}%", 100.0 * p.prob(r, s)))
                .collect();
            println!("  from {r}: {}", row.join(" "));
        }
        println!();
    }

    // The uniformization series is a fully independent route to the same
    // matrix; agreement is far below any tolerance that matters.
    let p = transition_probability_matrix(&q, 30.0)?;
    let oracle = uniformization_oracle(&q, 30.0, 1e-12)?;
    println!(
        "primary vs uniformization over 30 days: max |diff| = {:.2e}",
        p.max_abs_diff(&oracle)
    );

    // Chapman-Kolmogorov: a 30-day forecast equals two chained 15-day
    // forecasts.
    let p15 = transition_probability_matrix(&q, 15.0)?;
    let chained = p15.as_matrix() * p15.as_matrix();
    let dev = (p.as_matrix() - chained).abs().max();
    println!("P(30) vs P(15)*P(15):            max |diff| = {dev:.2e}");
    Ok(())
}
