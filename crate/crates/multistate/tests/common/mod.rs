//! Shared fixtures for the integration suites.

#![allow(dead_code)]

use multistate::likelihood::PanelDataset;
use multistate::model::{CovariateVector, ModelSpec, ParameterSet, TransitionParams};
use multistate::simulate::{sample_panel, subject_seed, CovariateTrajectory, SubjectTrajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// The paper-shaped three-state structure with two generic covariates and
/// moderate true effects; transitions are frequent enough that a 100-day
/// panel carries plenty of events.
pub fn recovery_spec() -> ModelSpec {
    ModelSpec::three_state(vec!["x1".into(), "x2".into()])
}

pub fn recovery_theta(spec: &ModelSpec) -> ParameterSet {
    let baselines = [0.12f64, 0.10, 0.12, 0.10];
    let betas = [
        vec![0.4, -0.3],
        vec![-0.2, 0.2],
        vec![0.3, 0.35],
        vec![-0.25, -0.15],
    ];
    let entries = baselines
        .iter()
        .zip(betas)
        .map(|(q, beta)| TransitionParams {
            log_baseline: q.ln(),
            beta,
        })
        .collect();
    ParameterSet::new(entries, spec).unwrap()
}

/// Daily covariates drawn uniformly from {-1, 0, +1} per subject and day:
/// informative for the coefficients while keeping the set of distinct
/// generator inputs small.
pub fn discrete_trajectories(
    spec: &ModelSpec,
    subjects: usize,
    days: usize,
    seed: u64,
) -> Vec<SubjectTrajectory> {
    (0..subjects)
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(subject_seed(seed ^ 0x7A57, i));
            let day_values: Vec<CovariateVector> = (0..days)
                .map(|_| {
                    let values = (0..spec.n_covariates())
                        .map(|_| (rng.random_range(0..3) as f64) - 1.0)
                        .collect();
                    CovariateVector::new(spec.covariate_names.clone(), values).unwrap()
                })
                .collect();
            SubjectTrajectory {
                subject_id: format!("s{i:04}"),
                initial_state: 1 + i % spec.k(),
                trajectory: CovariateTrajectory::new(day_values, spec).unwrap(),
            }
        })
        .collect()
}

/// Simulated daily panel under [`recovery_theta`].
pub fn recovery_panel(
    spec: &ModelSpec,
    subjects: usize,
    days: usize,
    seed: u64,
) -> PanelDataset {
    let theta = recovery_theta(spec);
    let trajectories = discrete_trajectories(spec, subjects, days, seed);
    let times: Vec<f64> = (0..days).map(|d| d as f64).collect();
    sample_panel(&theta, spec, &trajectories, &times, seed).unwrap()
}
