//! Simulate continuous-time paths and a daily panel, then compare the
//! empirical behaviour against the analytic quantities.
//!
//! ```bash
//! cargo run --example simulate_panel
//! ```

use multistate::model::assemble_generator;
use multistate::{
    sample_panel, simulate_path, sojourn_time, CovariateTrajectory, CovariateVector, ModelSpec,
    ParameterSet, SubjectTrajectory,
};

fn main() -> multistate::Result<()> {
    let spec = ModelSpec::three_state(vec![]);
    let theta = ParameterSet::from_baselines(&[0.4, 0.3, 0.35, 0.25], &spec)?;
    let z = CovariateVector::zeros(&[]);
    let q = assemble_generator(&theta, &z, &spec)?;

    // One path, printed move by move.
    let trajectory = CovariateTrajectory::constant(&z, 60, &spec)?;
    let path = simulate_path(&theta, &spec, &trajectory, 1, 60.0, 42)?;
    println!("one 60-day path from state 1 (seed 42):");
    let mut state = 1;
    for &(t, s) in path.jumps.iter().take(8) {
        println!("  day {t:>5.1}: {state} -> {s}");
        state = s;
    }
    if path.jumps.len() > 8 {
        println!("  ... {} more jumps", path.jumps.len() - 8);
    }

    // Many paths: empirical sojourns converge to 1 / (-q_rr).
    let mut stays = vec![Vec::new(); 4];
    for i in 0..400 {
        let p = simulate_path(
            &theta,
            &spec,
            &trajectory,
            1 + i % 3,
            60.0,
            multistate::simulate::subject_seed(7, i),
        )?;
        let mut current = 1 + i % 3;
        let mut entered = 0.0;
        for &(t, s) in &p.jumps {
            stays[current].push(t - entered);
            entered = t;
            current = s;
        }
    }
    println!("\nempirical vs analytic expected sojourn (days):");
    for r in 1..=3 {
        let n = stays[r].len();
        let mean: f64 = stays[r].iter().sum::<f64>() / n as f64;
        println!(
            "  state {r}: {mean:>5.2} over {n} completed stays, analytic {:>5.2}",
            sojourn_time(&q, r)
        );
    }

    // A panel in the observed-data layout: daily snapshots only.
    let subjects: Vec<SubjectTrajectory> = (0..6)
        .map(|i| SubjectTrajectory {
            subject_id: format!("line-{}", i + 1),
            initial_state: 1 + i % 3,
            trajectory: CovariateTrajectory::constant(&z, 62, &spec).unwrap(),
        })
        .collect();
    let times: Vec<f64> = (0..62).map(|d| d as f64).collect();
    let panel = sample_panel(&theta, &spec, &subjects, &times, 2024)?;
    println!(
        "\nsampled panel: {} subjects x {} days = {} records",
        panel.n_subjects(),
        62,
        panel.n_observations()
    );
    let first = &panel.subjects()[0];
    let states: String = first
        .observations()
        .iter()
        .map(|o| char::from(b'0' + o.state as u8))
        .collect();
    println!("  {} daily states: {states}", first.id);
    Ok(())
}
