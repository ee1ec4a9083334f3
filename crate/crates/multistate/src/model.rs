//! State space, allowed transitions, log-linear covariate parameterization,
//! and generator-matrix assembly.
//!
//! A process with `K` ordered states moves between them with transition
//! intensities `q_rs(z) = exp(log_baseline_rs + beta_rs . z)` for each
//! allowed pair `(r, s)`, zero elsewhere. The intensities fill the rows of a
//! generator matrix `Q` whose diagonal is the negative row sum, so that rows
//! sum to zero and the expected sojourn in state `r` is `1 / (-q_rr)`.
//!
//! State indices are 1-based throughout the public API.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered set of state labels, indexed 1..K.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::InvalidStateSpace(format!(
                "need at least 2 states, got {}",
                labels.len()
            )));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[i + 1..].contains(a) {
                return Err(Error::InvalidStateSpace(format!("duplicate label `{a}`")));
            }
        }
        Ok(Self { labels })
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Label of a 1-based state index.
    pub fn label(&self, state: usize) -> &str {
        &self.labels[state - 1]
    }

    pub fn check_state(&self, state: usize) -> Result<()> {
        if state == 0 || state > self.k() {
            return Err(Error::StateOutOfRange {
                state,
                k: self.k(),
            });
        }
        Ok(())
    }
}

/// An ordered pair of distinct 1-based states with a positive intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
}

impl Transition {
    pub fn new(from: usize, to: usize) -> Result<Self> {
        if from == to {
            return Err(Error::InvalidTransition(format!(
                "self-transition {from}->{to} is not allowed"
            )));
        }
        if from == 0 || to == 0 {
            return Err(Error::InvalidTransition(format!(
                "states are 1-based, got {from}->{to}"
            )));
        }
        Ok(Self { from, to })
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

impl std::str::FromStr for Transition {
    type Err = Error;

    /// Parses the `"r->s"` form used in configs and reports.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once("->").ok_or_else(|| {
            Error::InvalidTransition(format!("`{s}` is not of the form \"r->s\""))
        })?;
        let from: usize = a
            .trim()
            .parse()
            .map_err(|_| Error::InvalidTransition(format!("`{s}`: bad source state")))?;
        let to: usize = b
            .trim()
            .parse()
            .map_err(|_| Error::InvalidTransition(format!("`{s}`: bad target state")))?;
        Transition::new(from, to)
    }
}

/// Declared set of allowed transitions; order fixes the parameter layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionStructure {
    allowed: Vec<Transition>,
}

impl TransitionStructure {
    pub fn new(allowed: Vec<Transition>) -> Result<Self> {
        if allowed.is_empty() {
            return Err(Error::InvalidTransition(
                "at least one allowed transition is required".into(),
            ));
        }
        for (i, t) in allowed.iter().enumerate() {
            if allowed[i + 1..].contains(t) {
                return Err(Error::InvalidTransition(format!("duplicate transition {t}")));
            }
        }
        Ok(Self { allowed })
    }

    pub fn allowed(&self) -> &[Transition] {
        &self.allowed
    }

    pub fn len(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    pub fn contains(&self, from: usize, to: usize) -> bool {
        self.allowed.iter().any(|t| t.from == from && t.to == to)
    }

    /// True when every state can reach every other through allowed pairs.
    pub fn is_strongly_connected(&self, k: usize) -> bool {
        (1..=k).all(|start| {
            let mut seen = vec![false; k + 1];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(r) = stack.pop() {
                for t in &self.allowed {
                    if t.from == r && !seen[t.to] {
                        seen[t.to] = true;
                        stack.push(t.to);
                    }
                }
            }
            (1..=k).all(|s| seen[s])
        })
    }
}

/// Named covariate values at one point in time.
///
/// Names must cover the model's covariate list; order is free and resolved
/// by name when a generator is assembled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateVector {
    names: Vec<String>,
    values: Vec<f64>,
}

impl CovariateVector {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::InvalidStateSpace(format!(
                "covariate names ({}) and values ({}) differ in length",
                names.len(),
                values.len()
            )));
        }
        for (n, v) in names.iter().zip(&values) {
            if !v.is_finite() {
                return Err(Error::NonFiniteCovariate {
                    name: n.clone(),
                    value: *v,
                });
            }
        }
        Ok(Self { names, values })
    }

    /// Convenience constructor from `(name, value)` pairs.
    pub fn from_pairs(pairs: &[(&str, f64)]) -> Result<Self> {
        Self::new(
            pairs.iter().map(|(n, _)| n.to_string()).collect(),
            pairs.iter().map(|(_, v)| *v).collect(),
        )
    }

    /// All-zero covariates for the given names.
    pub fn zeros(names: &[String]) -> Self {
        Self {
            names: names.to_vec(),
            values: vec![0.0; names.len()],
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    /// Values reordered to match `names`, erroring on any missing name.
    pub fn aligned_to(&self, names: &[String]) -> Result<Vec<f64>> {
        names
            .iter()
            .map(|n| {
                self.get(n).ok_or_else(|| Error::MissingCovariate {
                    name: n.clone(),
                })
            })
            .collect()
    }

    /// Returns a copy with `offset` added to the named covariate.
    pub fn with_offset(&self, name: &str, offset: f64) -> Result<Self> {
        let idx = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::MissingCovariate { name: name.into() })?;
        let mut values = self.values.clone();
        values[idx] += offset;
        Self::new(self.names.clone(), values)
    }
}

/// Full model configuration: states, allowed transitions, covariate order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub states: StateSpace,
    pub transitions: TransitionStructure,
    pub covariate_names: Vec<String>,
}

impl ModelSpec {
    pub fn new(
        states: StateSpace,
        transitions: TransitionStructure,
        covariate_names: Vec<String>,
    ) -> Result<Self> {
        for t in transitions.allowed() {
            states.check_state(t.from)?;
            states.check_state(t.to)?;
        }
        for (i, n) in covariate_names.iter().enumerate() {
            if covariate_names[i + 1..].contains(n) {
                return Err(Error::InvalidStateSpace(format!(
                    "duplicate covariate name `{n}`"
                )));
            }
        }
        if !transitions.is_strongly_connected(states.k()) {
            log::warn!(
                "transition structure is not strongly connected; some states cannot reach others"
            );
        }
        Ok(Self {
            states,
            transitions,
            covariate_names,
        })
    }

    /// The paper-style three-state model: low/medium/high with moves only
    /// between neighbouring states.
    pub fn three_state(covariate_names: Vec<String>) -> Self {
        let states = StateSpace::new(vec!["low".into(), "medium".into(), "high".into()]).unwrap();
        let transitions = TransitionStructure::new(vec![
            Transition::new(1, 2).unwrap(),
            Transition::new(2, 1).unwrap(),
            Transition::new(2, 3).unwrap(),
            Transition::new(3, 2).unwrap(),
        ])
        .unwrap();
        Self::new(states, transitions, covariate_names).unwrap()
    }

    pub fn k(&self) -> usize {
        self.states.k()
    }

    pub fn n_covariates(&self) -> usize {
        self.covariate_names.len()
    }

    /// Total free parameters: |allowed| * (1 + p).
    pub fn n_parameters(&self) -> usize {
        self.transitions.len() * (1 + self.n_covariates())
    }

    /// Flat-vector index of the log baseline for transition `ti`.
    pub fn baseline_index(&self, ti: usize) -> usize {
        ti * (1 + self.n_covariates())
    }

    /// Flat-vector index of covariate `k`'s coefficient for transition `ti`.
    pub fn beta_index(&self, ti: usize, k: usize) -> usize {
        ti * (1 + self.n_covariates()) + 1 + k
    }

    /// Human-readable names for the flat parameter vector, in layout order.
    pub fn parameter_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.n_parameters());
        for t in self.transitions.allowed() {
            names.push(format!("q\u{2070}({t})"));
            for c in &self.covariate_names {
                names.push(format!("beta({t}, {c})"));
            }
        }
        names
    }
}

/// Per-transition log baseline intensity and covariate coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionParams {
    pub log_baseline: f64,
    pub beta: Vec<f64>,
}

/// The optimizer's coordinates: one [`TransitionParams`] per allowed
/// transition, in structure order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    entries: Vec<TransitionParams>,
}

impl ParameterSet {
    pub fn new(entries: Vec<TransitionParams>, spec: &ModelSpec) -> Result<Self> {
        let set = Self { entries };
        set.validate(spec)?;
        Ok(set)
    }

    /// Baselines on the natural scale, all coefficients zero.
    pub fn from_baselines(baselines: &[f64], spec: &ModelSpec) -> Result<Self> {
        if baselines.len() != spec.transitions.len() {
            return Err(Error::ParameterDimension {
                expected: spec.transitions.len(),
                actual: baselines.len(),
            });
        }
        let p = spec.n_covariates();
        let entries = baselines
            .iter()
            .map(|&q| TransitionParams {
                log_baseline: q.ln(),
                beta: vec![0.0; p],
            })
            .collect();
        Self::new(entries, spec)
    }

    pub fn validate(&self, spec: &ModelSpec) -> Result<()> {
        if self.entries.len() != spec.transitions.len() {
            return Err(Error::ParameterDimension {
                expected: spec.transitions.len(),
                actual: self.entries.len(),
            });
        }
        let names = spec.parameter_names();
        for (i, (e, t)) in self.entries.iter().zip(spec.transitions.allowed()).enumerate() {
            if e.beta.len() != spec.n_covariates() {
                return Err(Error::ParameterDimension {
                    expected: spec.n_covariates(),
                    actual: e.beta.len(),
                });
            }
            if !e.log_baseline.is_finite() {
                return Err(Error::NonFiniteParameter {
                    name: names[spec.baseline_index(i)].clone(),
                    value: e.log_baseline,
                });
            }
            for (k, b) in e.beta.iter().enumerate() {
                if !b.is_finite() {
                    return Err(Error::NonFiniteParameter {
                        name: format!("beta({t}, {})", spec.covariate_names[k]),
                        value: *b,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[TransitionParams] {
        &self.entries
    }

    pub fn entry(&self, ti: usize) -> &TransitionParams {
        &self.entries[ti]
    }

    /// Baseline intensity `q0_rs = exp(log_baseline)` for transition `ti`.
    pub fn baseline(&self, ti: usize) -> f64 {
        self.entries[ti].log_baseline.exp()
    }

    pub fn len_flat(&self) -> usize {
        self.entries.iter().map(|e| 1 + e.beta.len()).sum()
    }

    /// Flattens to the optimizer layout: per transition, log baseline then
    /// coefficients in covariate order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len_flat());
        for e in &self.entries {
            out.push(e.log_baseline);
            out.extend_from_slice(&e.beta);
        }
        out
    }

    pub fn from_flat(flat: &[f64], spec: &ModelSpec) -> Result<Self> {
        if flat.len() != spec.n_parameters() {
            return Err(Error::ParameterDimension {
                expected: spec.n_parameters(),
                actual: flat.len(),
            });
        }
        let p = spec.n_covariates();
        let entries = flat
            .chunks_exact(1 + p)
            .map(|c| TransitionParams {
                log_baseline: c[0],
                beta: c[1..].to_vec(),
            })
            .collect();
        Ok(Self { entries })
    }
}

/// K x K intensity matrix with zero row sums; units are day^-1.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    q: DMatrix<f64>,
}

impl GeneratorMatrix {
    /// Builds a generator from off-diagonal rates; the diagonal is set to
    /// the negative row sum so rows cancel exactly.
    pub fn from_rates(k: usize, rates: &[(usize, usize, f64)]) -> Result<Self> {
        let mut q = DMatrix::zeros(k, k);
        for &(r, s, rate) in rates {
            if r == s || r == 0 || s == 0 || r > k || s > k {
                return Err(Error::InvalidGenerator(format!(
                    "rate index ({r},{s}) invalid for K={k}"
                )));
            }
            if !rate.is_finite() || rate < 0.0 {
                return Err(Error::InvalidGenerator(format!(
                    "rate q({r},{s}) = {rate} must be finite and non-negative"
                )));
            }
            q[(r - 1, s - 1)] = rate;
        }
        for r in 0..k {
            let exit: f64 = (0..k).filter(|&s| s != r).map(|s| q[(r, s)]).sum();
            q[(r, r)] = -exit;
        }
        Ok(Self { q })
    }

    /// Validates an externally built matrix against the generator invariants.
    pub fn from_matrix(q: DMatrix<f64>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::InvalidGenerator("matrix must be square".into()));
        }
        let k = q.nrows();
        for r in 0..k {
            let mut sum = 0.0;
            for s in 0..k {
                let v = q[(r, s)];
                if !v.is_finite() {
                    return Err(Error::InvalidGenerator(format!(
                        "entry ({},{}) is not finite",
                        r + 1,
                        s + 1
                    )));
                }
                if r != s && v < 0.0 {
                    return Err(Error::InvalidGenerator(format!(
                        "off-diagonal entry ({},{}) = {v} is negative",
                        r + 1,
                        s + 1
                    )));
                }
                sum += v;
            }
            if sum.abs() > 1e-12 {
                return Err(Error::InvalidGenerator(format!(
                    "row {} sums to {sum}, not 0",
                    r + 1
                )));
            }
        }
        Ok(Self { q })
    }

    pub fn k(&self) -> usize {
        self.q.nrows()
    }

    /// Intensity `q_rs` with 1-based indices.
    pub fn rate(&self, r: usize, s: usize) -> f64 {
        self.q[(r - 1, s - 1)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.q
    }
}

/// Assembles `Q(z)` from parameters and covariates.
///
/// `q_rs(z) = exp(log_baseline_rs + beta_rs . z)` for allowed pairs, zero
/// elsewhere; the diagonal is the negative row sum.
pub fn assemble_generator(
    theta: &ParameterSet,
    z: &CovariateVector,
    spec: &ModelSpec,
) -> Result<GeneratorMatrix> {
    theta.validate(spec)?;
    let aligned = z.aligned_to(&spec.covariate_names)?;
    for (n, v) in spec.covariate_names.iter().zip(&aligned) {
        if !v.is_finite() {
            return Err(Error::NonFiniteCovariate {
                name: n.clone(),
                value: *v,
            });
        }
    }
    Ok(assemble_generator_aligned(theta, &aligned, spec))
}

/// Hot-path assembly: covariate values already in `spec` order and finite,
/// `theta` already validated.
pub(crate) fn assemble_generator_aligned(
    theta: &ParameterSet,
    z: &[f64],
    spec: &ModelSpec,
) -> GeneratorMatrix {
    let k = spec.k();
    let mut q = DMatrix::zeros(k, k);
    for (t, e) in spec.transitions.allowed().iter().zip(theta.entries()) {
        let mut lin = e.log_baseline;
        for (b, v) in e.beta.iter().zip(z) {
            lin += b * v;
        }
        q[(t.from - 1, t.to - 1)] = lin.exp();
    }
    for r in 0..k {
        let exit: f64 = (0..k).filter(|&s| s != r).map(|s| q[(r, s)]).sum();
        q[(r, r)] = -exit;
    }
    GeneratorMatrix { q }
}

/// Expected residence time in state `r` (1-based), in days: `1 / (-q_rr)`.
///
/// A state with no exit under the current parameters reports an infinite
/// sojourn rather than an error.
pub fn sojourn_time(q: &GeneratorMatrix, r: usize) -> f64 {
    let exit = -q.q[(r - 1, r - 1)];
    if exit <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / exit
    }
}

/// Distribution of the next state on leaving `r`: entries `q_rs / (-q_rr)`
/// over all `s != r`, in ascending state order.
pub fn next_state_distribution(q: &GeneratorMatrix, r: usize) -> Result<Vec<(usize, f64)>> {
    let exit = -q.q[(r - 1, r - 1)];
    if exit <= 0.0 {
        return Err(Error::AbsorbingState { state: r });
    }
    Ok((1..=q.k())
        .filter(|&s| s != r)
        .map(|s| (s, q.q[(r - 1, s - 1)] / exit))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gh3_spec() -> ModelSpec {
        ModelSpec::three_state(vec!["co2".into(), "rh".into(), "par".into()])
    }

    fn gh3_baseline_theta(spec: &ModelSpec) -> ParameterSet {
        ParameterSet::from_baselines(&[0.005, 0.021, 0.022, 1e-9], spec).unwrap()
    }

    #[test]
    fn generator_from_gh3_baselines_matches_reported_intensities() {
        let spec = gh3_spec();
        let theta = gh3_baseline_theta(&spec);
        let z = CovariateVector::zeros(&spec.covariate_names);
        let q = assemble_generator(&theta, &z, &spec).unwrap();
        let expect = [
            [-0.005, 0.005, 0.0],
            [0.021, -0.043, 0.022],
            [0.0, 0.0, 0.0],
        ];
        for r in 1..=3 {
            for s in 1..=3 {
                assert!(
                    (q.rate(r, s) - expect[r - 1][s - 1]).abs() < 5e-4,
                    "q({r},{s}) = {}",
                    q.rate(r, s)
                );
            }
        }
    }

    #[test]
    fn zero_covariates_recover_baselines_exactly() {
        let spec = gh3_spec();
        let theta = gh3_baseline_theta(&spec);
        let z = CovariateVector::zeros(&spec.covariate_names);
        let q = assemble_generator(&theta, &z, &spec).unwrap();
        assert_eq!(q.rate(1, 2), theta.baseline(0));
        assert_eq!(q.rate(2, 1), theta.baseline(1));
        assert_eq!(q.rate(2, 3), theta.baseline(2));
    }

    #[test]
    fn rh_hazard_ratio_scales_the_pooled_baseline() {
        // Pooled q12 baseline times the RH hazard ratio at +1 SD.
        let spec = gh3_spec();
        let mut entries = gh3_baseline_theta(&spec).entries().to_vec();
        entries[0].log_baseline = 0.038f64.ln();
        entries[0].beta[1] = 5.10f64.ln();
        let theta = ParameterSet::new(entries, &spec).unwrap();
        let z = CovariateVector::from_pairs(&[("co2", 0.0), ("rh", 1.0), ("par", 0.0)]).unwrap();
        let q = assemble_generator(&theta, &z, &spec).unwrap();
        assert_relative_eq!(q.rate(1, 2), 0.1938, max_relative = 1e-12);
    }

    #[test]
    fn missing_covariate_is_rejected_with_name() {
        let spec = gh3_spec();
        let theta = gh3_baseline_theta(&spec);
        let z = CovariateVector::from_pairs(&[("co2", 0.0), ("rh", 0.0)]).unwrap();
        let err = assemble_generator(&theta, &z, &spec).unwrap_err();
        match err {
            Error::MissingCovariate { name } => assert_eq!(name, "par"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn non_finite_parameter_is_rejected_with_name() {
        let spec = gh3_spec();
        let mut entries = gh3_baseline_theta(&spec).entries().to_vec();
        entries[2].beta[0] = f64::NAN;
        let err = ParameterSet::new(entries, &spec).unwrap_err();
        match err {
            Error::NonFiniteParameter { name, .. } => assert_eq!(name, "beta(2->3, co2)"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn sojourn_times_match_reported_values() {
        let q = GeneratorMatrix::from_rates(3, &[(1, 2, 0.005), (2, 1, 0.021), (2, 3, 0.022)])
            .unwrap();
        // State 2 exits at 0.043/day: about 23 days.
        assert!((sojourn_time(&q, 2) - 23.26).abs() < 0.5);
        // Pooled state 1 at 0.038/day: roughly 26 days.
        let qp = GeneratorMatrix::from_rates(3, &[(1, 2, 0.038)]).unwrap();
        assert!((sojourn_time(&qp, 1) - 26.3).abs() < 0.5);
        // Unit exit rate: exactly one day.
        let q1 = GeneratorMatrix::from_rates(2, &[(1, 2, 1.0)]).unwrap();
        assert_eq!(sojourn_time(&q1, 1), 1.0);
        // Absorbing state reports an infinite sojourn, not an error.
        assert!(sojourn_time(&q, 3).is_infinite());
    }

    #[test]
    fn next_state_distribution_matches_intensity_ratios() {
        let q = GeneratorMatrix::from_rates(3, &[(2, 1, 0.021), (2, 3, 0.022)]).unwrap();
        let dist = next_state_distribution(&q, 2).unwrap();
        assert_eq!(dist.len(), 2);
        assert_relative_eq!(dist[0].1, 0.488, epsilon = 5e-4);
        assert_relative_eq!(dist[1].1, 0.512, epsilon = 5e-4);
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);

        // Single exit gets probability one.
        let q1 = GeneratorMatrix::from_rates(3, &[(1, 2, 0.4)]).unwrap();
        let d1 = next_state_distribution(&q1, 1).unwrap();
        assert_eq!(d1, vec![(2, 1.0), (3, 0.0)]);

        // Equal rates split evenly.
        let qe = GeneratorMatrix::from_rates(3, &[(2, 1, 0.7), (2, 3, 0.7)]).unwrap();
        let de = next_state_distribution(&qe, 2).unwrap();
        assert_eq!(de[0].1, 0.5);
        assert_eq!(de[1].1, 0.5);

        assert!(matches!(
            next_state_distribution(&q1, 3),
            Err(Error::AbsorbingState { state: 3 })
        ));
    }

    #[test]
    fn parameter_flattening_round_trips() {
        let spec = gh3_spec();
        let theta = gh3_baseline_theta(&spec);
        let flat = theta.to_flat();
        assert_eq!(flat.len(), spec.n_parameters());
        assert_eq!(spec.n_parameters(), 16);
        let back = ParameterSet::from_flat(&flat, &spec).unwrap();
        assert_eq!(back, theta);
    }

    #[test]
    fn transition_parsing_accepts_arrows_and_rejects_self_loops() {
        let t: Transition = "1->2".parse().unwrap();
        assert_eq!((t.from, t.to), (1, 2));
        assert!(" 2 -> 3 ".trim().parse::<Transition>().is_ok());
        assert!("1->1".parse::<Transition>().is_err());
        assert!("1-2".parse::<Transition>().is_err());
        assert!("0->1".parse::<Transition>().is_err());
    }

    #[test]
    fn connectivity_check_detects_unreachable_states() {
        let ts = TransitionStructure::new(vec![
            Transition::new(1, 2).unwrap(),
            Transition::new(2, 1).unwrap(),
        ])
        .unwrap();
        assert!(ts.is_strongly_connected(2));
        assert!(!ts.is_strongly_connected(3));
    }
}
