//! Build the three-state yield model, assemble generator matrices at
//! different covariate settings, and read off sojourn times and jump
//! distributions.
//!
//! ```bash
//! cargo run --example generator_basics
//! ```

use multistate::{
    assemble_generator, next_state_distribution, sojourn_time, CovariateVector, ModelSpec,
    ParameterSet, TransitionParams,
};

fn main() -> multistate::Result<()> {
    // Three ordered yield states; moves only between neighbours.
    let spec = ModelSpec::three_state(vec!["co2".into(), "rh".into(), "par".into()]);
    println!("states: {:?}", spec.states.labels());
    println!(
        "allowed transitions: {}",
        spec.transitions
            .allowed()
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("free parameters: {}\n", spec.n_parameters());

    // Baseline intensities (day^-1) with an RH effect on the 1->2 move:
    // a +1 SD humid day multiplies that rate by 5.1.
    let entries = vec![
        TransitionParams { log_baseline: 0.038f64.ln(), beta: vec![0.0, 5.10f64.ln(), 0.0] },
        TransitionParams { log_baseline: 0.026f64.ln(), beta: vec![0.0, 0.0, 0.0] },
        TransitionParams { log_baseline: 0.040f64.ln(), beta: vec![0.0, 0.0, 0.0] },
        TransitionParams { log_baseline: 0.018f64.ln(), beta: vec![0.0, 0.0, 0.0] },
    ];
    let theta = ParameterSet::new(entries, &spec)?;

    for (label, rh) in [("average day (z = 0)", 0.0), ("humid day (RH +1 SD)", 1.0)] {
        let z = CovariateVector::from_pairs(&[("co2", 0.0), ("rh", rh), ("par", 0.0)])?;
        let q = assemble_generator(&theta, &z, &spec)?;
        println!("generator on a {label}:");
        for r in 1..=3 {
            let row: Vec<String> = (1..=3).map(|s| format!("{:>8.4}", q.rate(r, s))).collect();
            println!("  {}", row.join(" "));
        }
        for r in 1..=3 {
            let sojourn = sojourn_time(&q, r);
            print!(
                "  state {r} ({}): expected stay {:.1} days",
                spec.states.label(r),
                sojourn
            );
            match next_state_distribution(&q, r) {
                Ok(dist) => {
                    let parts: Vec<String> = dist
                        .iter()
                        .filter(|(_, p)| *p > 0.0)
                        .map(|(s, p)| format!("{:.1}% to {}", 100.0 * p, spec.states.label(*s)))
                        .collect();
                    println!(", on exit {}", parts.join(", "));
                }
                Err(_) => println!(" (absorbing)"),
            }
        }
        println!();
    }
    Ok(())
}
