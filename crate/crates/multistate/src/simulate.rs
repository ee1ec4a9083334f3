//! Forward simulation of the continuous-time chain and panel sampling.
//!
//! Covariates are piecewise constant over whole days. Within a day the
//! waiting time in the current state is exponential at the current total
//! exit rate; a wait that crosses the day boundary is re-sampled from the
//! boundary with the next day's rates, which is exact by memorylessness.
//! Jump targets follow the embedded jump distribution
//! `q_rs / (-q_rr)`.
//!
//! Reproducibility: a single 64-bit master seed yields one substream per
//! subject through a splitmix64 hash of the seed and the subject index
//! (see [`subject_seed`]), so each subject's path is independent of how
//! many other subjects are simulated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::likelihood::{PanelDataset, PanelObservation};
use crate::model::{
    assemble_generator_aligned, CovariateVector, GeneratorMatrix, ModelSpec, ParameterSet,
};

/// Daily covariate values for one subject, days contiguous from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateTrajectory {
    /// Per day, values aligned to the model's covariate order.
    days: Vec<Vec<f64>>,
}

impl CovariateTrajectory {
    pub fn new(days: Vec<CovariateVector>, spec: &ModelSpec) -> Result<Self> {
        if days.is_empty() {
            return Err(Error::InvalidPanel("trajectory has no days".into()));
        }
        let aligned = days
            .iter()
            .map(|d| d.aligned_to(&spec.covariate_names))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { days: aligned })
    }

    /// A constant trajectory holding `z` for `n_days` days.
    pub fn constant(z: &CovariateVector, n_days: usize, spec: &ModelSpec) -> Result<Self> {
        let aligned = z.aligned_to(&spec.covariate_names)?;
        Ok(Self {
            days: vec![aligned; n_days.max(1)],
        })
    }

    pub fn n_days(&self) -> usize {
        self.days.len()
    }

    /// Aligned values for a day, clamped to the last available day.
    pub fn day(&self, day: usize) -> &[f64] {
        &self.days[day.min(self.days.len() - 1)]
    }
}

/// One subject's simulation inputs.
#[derive(Debug, Clone)]
pub struct SubjectTrajectory {
    pub subject_id: String,
    pub initial_state: usize,
    pub trajectory: CovariateTrajectory,
}

/// A realized path: the initial state and every jump `(time, new_state)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPath {
    pub subject_id: String,
    pub initial_state: usize,
    pub jumps: Vec<(f64, usize)>,
}

impl SimulatedPath {
    /// State occupied at time `t` (jumps at exactly `t` count as having
    /// happened).
    pub fn state_at(&self, t: f64) -> usize {
        let mut state = self.initial_state;
        for &(jt, s) in &self.jumps {
            if jt <= t {
                state = s;
            } else {
                break;
            }
        }
        state
    }
}

/// Per-subject substream seed: splitmix64 over the master seed mixed with
/// the 1-based subject index scaled by the golden-ratio constant.
pub fn subject_seed(master: u64, subject_index: usize) -> u64 {
    splitmix64(master ^ (subject_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sample_exponential(rng: &mut ChaCha12Rng, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

/// Simulates one path over `[0, horizon)` days, deterministic in `seed`.
///
/// A state with zero total exit rate under the day's parameters simply
/// stalls until the rates change or the horizon ends.
pub fn simulate_path(
    theta: &ParameterSet,
    spec: &ModelSpec,
    traj: &CovariateTrajectory,
    initial_state: usize,
    horizon: f64,
    seed: u64,
) -> Result<SimulatedPath> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidHorizon(horizon));
    }
    spec.states.check_state(initial_state)?;
    theta.validate(spec)?;
    if (traj.n_days() as f64) < horizon {
        return Err(Error::InvalidPanel(format!(
            "trajectory covers {} days but the horizon is {horizon}",
            traj.n_days()
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut jumps = Vec::new();
    let mut state = initial_state;
    let mut t = 0.0f64;
    let mut current_day = usize::MAX;
    let mut generator: Option<GeneratorMatrix> = None;
    let mut last_z: &[f64] = &[];

    while t < horizon {
        let day = t.floor() as usize;
        let day_end = (day as f64 + 1.0).min(horizon);
        if day != current_day {
            let z = traj.day(day);
            if generator.is_none() || z != last_z {
                generator = Some(assemble_generator_aligned(theta, z, spec));
            }
            last_z = traj.day(day);
            current_day = day;
        }
        let q = generator.as_ref().unwrap();
        let exit_rate = -q.rate(state, state);
        if exit_rate <= 0.0 {
            t = day_end;
            continue;
        }
        let wait = sample_exponential(&mut rng, exit_rate);
        let jump_time = t + wait;
        if jump_time >= day_end {
            // Crossed into the next day (or past the horizon): re-sample
            // there with that day's rates.
            t = day_end;
            continue;
        }
        // Choose the landing state from the embedded jump distribution.
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut target = 0;
        for s in 1..=spec.k() {
            if s == state {
                continue;
            }
            cumulative += q.rate(state, s) / exit_rate;
            target = s;
            if u < cumulative {
                break;
            }
        }
        state = target;
        t = jump_time;
        jumps.push((t, state));
    }

    Ok(SimulatedPath {
        subject_id: String::new(),
        initial_state,
        jumps,
    })
}

/// Simulates every subject and records the state at each observation time
/// together with that day's covariates.
///
/// Observation times must be strictly increasing and start at 0. Each
/// subject uses its own [`subject_seed`] substream.
pub fn sample_panel(
    theta: &ParameterSet,
    spec: &ModelSpec,
    subjects: &[SubjectTrajectory],
    observation_times: &[f64],
    seed: u64,
) -> Result<PanelDataset> {
    if observation_times.is_empty() {
        return Err(Error::InvalidPanel("no observation times".into()));
    }
    if observation_times[0] != 0.0 {
        return Err(Error::InvalidPanel(
            "observation times must start at 0".into(),
        ));
    }
    for w in observation_times.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidPanel(
                "observation times must be strictly increasing".into(),
            ));
        }
    }
    let horizon = *observation_times.last().unwrap();
    let mut records = Vec::with_capacity(subjects.len() * observation_times.len());
    for (i, subj) in subjects.iter().enumerate() {
        let path = if horizon > 0.0 {
            let mut p = simulate_path(
                theta,
                spec,
                &subj.trajectory,
                subj.initial_state,
                horizon,
                subject_seed(seed, i),
            )?;
            p.subject_id = subj.subject_id.clone();
            p
        } else {
            spec.states.check_state(subj.initial_state)?;
            SimulatedPath {
                subject_id: subj.subject_id.clone(),
                initial_state: subj.initial_state,
                jumps: Vec::new(),
            }
        };
        for &t in observation_times {
            let day = t.floor() as usize;
            let values = subj.trajectory.day(day).to_vec();
            records.push(PanelObservation {
                subject_id: subj.subject_id.clone(),
                time: t,
                state: path.state_at(t),
                covariates: CovariateVector::new(spec.covariate_names.clone(), values)?,
            });
        }
    }
    PanelDataset::from_observations(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ParameterSet;

    fn two_state_spec() -> ModelSpec {
        let states = crate::model::StateSpace::new(vec!["a".into(), "b".into()]).unwrap();
        let transitions = crate::model::TransitionStructure::new(vec![
            crate::model::Transition::new(1, 2).unwrap(),
            crate::model::Transition::new(2, 1).unwrap(),
        ])
        .unwrap();
        ModelSpec::new(states, transitions, vec![]).unwrap()
    }

    fn flat_trajectory(spec: &ModelSpec, n_days: usize) -> CovariateTrajectory {
        CovariateTrajectory::constant(&CovariateVector::zeros(&spec.covariate_names), n_days, spec)
            .unwrap()
    }

    #[test]
    fn identical_seeds_give_identical_paths() {
        let spec = two_state_spec();
        let theta = ParameterSet::from_baselines(&[0.8, 0.6], &spec).unwrap();
        let traj = flat_trajectory(&spec, 50);
        let a = simulate_path(&theta, &spec, &traj, 1, 50.0, 99).unwrap();
        let b = simulate_path(&theta, &spec, &traj, 1, 50.0, 99).unwrap();
        assert_eq!(a, b);
        let c = simulate_path(&theta, &spec, &traj, 1, 50.0, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn vanishing_rates_produce_no_jumps() {
        let spec = two_state_spec();
        let theta = ParameterSet::from_baselines(&[1e-12, 1e-12], &spec).unwrap();
        let traj = flat_trajectory(&spec, 100);
        let path = simulate_path(&theta, &spec, &traj, 1, 100.0, 7).unwrap();
        assert!(path.jumps.is_empty());
        assert_eq!(path.state_at(99.5), 1);
    }

    #[test]
    fn jump_times_increase_and_respect_the_structure() {
        let spec = ModelSpec::three_state(vec![]);
        let theta = ParameterSet::from_baselines(&[0.5, 0.4, 0.5, 0.4], &spec).unwrap();
        let traj = flat_trajectory(&spec, 200);
        let path = simulate_path(&theta, &spec, &traj, 1, 200.0, 3).unwrap();
        assert!(!path.jumps.is_empty());
        let mut prev_t = 0.0;
        let mut prev_s = 1;
        for &(t, s) in &path.jumps {
            assert!(t > prev_t);
            assert!(spec.transitions.contains(prev_s, s), "{prev_s}->{s}");
            prev_t = t;
            prev_s = s;
        }
    }

    #[test]
    fn two_state_occupancy_matches_the_closed_form() {
        // Fraction still in state 1 at t=2 for a=b=0.5 is about 0.5677.
        let spec = two_state_spec();
        let theta = ParameterSet::from_baselines(&[0.5, 0.5], &spec).unwrap();
        let traj = flat_trajectory(&spec, 2);
        let n = 10_000;
        let mut in_state_1 = 0;
        for i in 0..n {
            let path = simulate_path(&theta, &spec, &traj, 1, 2.0, subject_seed(4242, i)).unwrap();
            if path.state_at(2.0) == 1 {
                in_state_1 += 1;
            }
        }
        let fraction = in_state_1 as f64 / n as f64;
        let expect = 0.5 + 0.5 * (-2.0f64).exp();
        assert!(
            (fraction - expect).abs() < 0.0149,
            "fraction = {fraction}, expect = {expect}"
        );
    }

    #[test]
    fn panel_at_time_zero_records_initial_states() {
        let spec = two_state_spec();
        let theta = ParameterSet::from_baselines(&[0.5, 0.5], &spec).unwrap();
        let subjects: Vec<SubjectTrajectory> = (0..5)
            .map(|i| SubjectTrajectory {
                subject_id: format!("s{i}"),
                initial_state: 1 + i % 2,
                trajectory: flat_trajectory(&spec, 1),
            })
            .collect();
        let panel = sample_panel(&theta, &spec, &subjects, &[0.0], 1).unwrap();
        assert_eq!(panel.n_observations(), 5);
        assert_eq!(panel.n_intervals(), 0);
        for (subj, expected) in panel.subjects().iter().zip([1, 2, 1, 2, 1]) {
            assert_eq!(subj.observations()[0].state, expected);
        }
    }

    #[test]
    fn daily_panel_has_the_expected_layout() {
        // 24 subjects observed on 62 consecutive days: 1488 records.
        let spec = ModelSpec::three_state(vec![]);
        let theta = ParameterSet::from_baselines(&[0.038, 0.026, 0.040, 0.018], &spec).unwrap();
        let subjects: Vec<SubjectTrajectory> = (0..24)
            .map(|i| SubjectTrajectory {
                subject_id: format!("gh-{}-line-{}", i / 6 + 2, i % 6 + 1),
                initial_state: 1 + i % 3,
                trajectory: flat_trajectory(&spec, 62),
            })
            .collect();
        let times: Vec<f64> = (0..62).map(|d| d as f64).collect();
        let panel = sample_panel(&theta, &spec, &subjects, &times, 2024).unwrap();
        assert_eq!(panel.n_subjects(), 24);
        assert_eq!(panel.n_observations(), 24 * 62);
        assert_eq!(panel.n_intervals(), 24 * 61);
    }

    #[test]
    fn subject_substreams_are_stable_under_subject_count() {
        let spec = two_state_spec();
        let theta = ParameterSet::from_baselines(&[0.5, 0.5], &spec).unwrap();
        let mk = |n: usize| -> Vec<SubjectTrajectory> {
            (0..n)
                .map(|i| SubjectTrajectory {
                    subject_id: format!("s{i:02}"),
                    initial_state: 1,
                    trajectory: flat_trajectory(&spec, 10),
                })
                .collect()
        };
        let times: Vec<f64> = (0..10).map(|d| d as f64).collect();
        let small = sample_panel(&theta, &spec, &mk(3), &times, 5).unwrap();
        let large = sample_panel(&theta, &spec, &mk(6), &times, 5).unwrap();
        // The first three subjects are identical in both panels.
        for i in 0..3 {
            assert_eq!(small.subjects()[i], large.subjects()[i]);
        }
    }
}
