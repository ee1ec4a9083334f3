//! Run configuration: a strict TOML schema shared by every subcommand.
//!
//! Unknown keys are rejected, transition strings are validated while the
//! file is parsed (so errors carry line numbers), and cross-references
//! (covariate names in predict/scenario/simulate sections) are checked
//! against the model block after parsing.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{ModelSpec, ParameterSet, StateSpace, Transition, TransitionParams, TransitionStructure};
use crate::optim::{Algorithm, FitOptions};
use crate::pipeline::PipelineOptions;

/// A transition in its `"r->s"` text form; parsing validates the shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TransitionKey(pub Transition);

impl<'de> Deserialize<'de> for TransitionKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Transition>()
            .map(TransitionKey)
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for TransitionKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub states: Vec<String>,
    pub transitions: Vec<TransitionKey>,
    #[serde(default)]
    pub covariates: Vec<String>,
}

impl ModelConfig {
    pub fn to_spec(&self) -> Result<ModelSpec> {
        let states = StateSpace::new(self.states.clone())?;
        let transitions =
            TransitionStructure::new(self.transitions.iter().map(|t| t.0).collect())?;
        ModelSpec::new(states, transitions, self.covariates.clone())
    }

    pub fn from_spec(spec: &ModelSpec) -> Self {
        Self {
            states: spec.states.labels().to_vec(),
            transitions: spec
                .transitions
                .allowed()
                .iter()
                .map(|t| TransitionKey(*t))
                .collect(),
            covariates: spec.covariate_names.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub sensor: Option<PathBuf>,
    pub harvest: Option<PathBuf>,
    pub panel: Option<PathBuf>,
    /// Fit report consumed by `report`, `predict` and `scenario`;
    /// defaults to `<output dir>/fit_result.json`.
    pub fit_result: Option<PathBuf>,
}

/// Which optimizer(s) a `fit` run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmChoice {
    Bfgs,
    NelderMead,
    Both,
}

impl std::str::FromStr for AlgorithmChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bfgs" => Ok(Self::Bfgs),
            "nelder-mead" => Ok(Self::NelderMead),
            "both" => Ok(Self::Both),
            other => Err(Error::Config(format!(
                "unknown algorithm `{other}` (expected bfgs, nelder-mead or both)"
            ))),
        }
    }
}

impl AlgorithmChoice {
    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            Self::Bfgs => vec![Algorithm::Bfgs],
            Self::NelderMead => vec![Algorithm::NelderMead],
            Self::Both => vec![Algorithm::Bfgs, Algorithm::NelderMead],
        }
    }
}

fn default_algorithm() -> AlgorithmChoice {
    AlgorithmChoice::Bfgs
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default = "default_algorithm")]
    pub algorithm: AlgorithmChoice,
    pub max_iterations: Option<usize>,
    pub gradient_tolerance: Option<f64>,
    pub function_tolerance: Option<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            algorithm: default_algorithm(),
            max_iterations: None,
            gradient_tolerance: None,
            function_tolerance: None,
        }
    }
}

impl FitConfig {
    /// Options for one concrete algorithm, starting from its defaults.
    pub fn options_for(&self, algorithm: Algorithm) -> FitOptions {
        let mut opts = match algorithm {
            Algorithm::Bfgs => FitOptions::bfgs(),
            Algorithm::NelderMead => FitOptions::nelder_mead(),
        };
        if let Some(n) = self.max_iterations {
            opts.max_iterations = n;
        }
        if let Some(g) = self.gradient_tolerance {
            opts.gradient_tolerance = g;
        }
        if let Some(f) = self.function_tolerance {
            opts.function_tolerance = f;
        }
        opts
    }
}

fn default_horizon() -> f64 {
    30.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictConfig {
    #[serde(default = "default_horizon")]
    pub horizon_days: f64,
    /// Covariate setting; names omitted here default to 0.
    #[serde(default)]
    pub covariates: BTreeMap<String, f64>,
}

impl Default for PredictConfig {
    fn default() -> Self {
        Self {
            horizon_days: default_horizon(),
            covariates: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Falls back to the predict horizon when absent.
    pub horizon_days: Option<f64>,
    #[serde(default)]
    pub base: BTreeMap<String, f64>,
    #[serde(default)]
    pub alt: BTreeMap<String, f64>,
}

fn default_reference() -> String {
    "GH-3".into()
}

fn default_climate() -> Vec<String> {
    vec!["co2".into(), "rh".into(), "par".into()]
}

fn default_window() -> usize {
    7
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_reference")]
    pub reference_group: String,
    #[serde(default = "default_climate")]
    pub standardize: Vec<String>,
    #[serde(default = "default_climate")]
    pub panel_covariates: Vec<String>,
    #[serde(default = "default_window")]
    pub detrend_window: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            reference_group: default_reference(),
            standardize: default_climate(),
            panel_covariates: default_climate(),
            detrend_window: default_window(),
        }
    }
}

impl PipelineConfig {
    pub fn to_options(&self) -> PipelineOptions {
        PipelineOptions {
            reference_group: self.reference_group.clone(),
            standardize: self.standardize.clone(),
            panel_covariates: self.panel_covariates.clone(),
            detrend_window: self.detrend_window,
        }
    }
}

/// How simulated covariate trajectories are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovariateModel {
    /// All covariates held at zero.
    Zeros,
    /// Independent standard normal draws per subject, day and covariate.
    Gaussian,
}

fn default_covariate_model() -> CovariateModel {
    CovariateModel::Gaussian
}

fn default_initial_state() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub subjects: usize,
    pub days: usize,
    #[serde(default = "default_initial_state")]
    pub initial_state: usize,
    #[serde(default = "default_covariate_model")]
    pub covariate_model: CovariateModel,
    /// Baseline intensity (day^-1) per allowed transition; every
    /// transition in the model must appear.
    pub intensities: BTreeMap<TransitionKey, f64>,
    /// Log hazard-ratio coefficients per transition and covariate;
    /// anything omitted is 0.
    #[serde(default)]
    pub beta: BTreeMap<TransitionKey, BTreeMap<String, f64>>,
}

impl SimulateConfig {
    /// Builds the generating parameters against the model spec.
    pub fn to_parameters(&self, spec: &ModelSpec) -> Result<ParameterSet> {
        let mut entries = Vec::with_capacity(spec.transitions.len());
        for t in spec.transitions.allowed() {
            let q0 = self
                .intensities
                .get(&TransitionKey(*t))
                .copied()
                .ok_or_else(|| {
                    Error::Config(format!("simulate.intensities is missing \"{t}\""))
                })?;
            if !(q0 > 0.0 && q0.is_finite()) {
                return Err(Error::Config(format!(
                    "simulate.intensities[\"{t}\"] must be a positive finite rate, got {q0}"
                )));
            }
            let mut beta = vec![0.0; spec.n_covariates()];
            if let Some(effects) = self.beta.get(&TransitionKey(*t)) {
                for (name, value) in effects {
                    let k = spec
                        .covariate_names
                        .iter()
                        .position(|c| c == name)
                        .ok_or_else(|| {
                            Error::Config(format!(
                                "simulate.beta[\"{t}\"] names unknown covariate `{name}`"
                            ))
                        })?;
                    beta[k] = *value;
                }
            }
            entries.push(TransitionParams {
                log_baseline: q0.ln(),
                beta,
            });
        }
        for key in self.intensities.keys() {
            if !spec.transitions.contains(key.0.from, key.0.to) {
                return Err(Error::Config(format!(
                    "simulate.intensities names transition \"{}\" not in the model",
                    key.0
                )));
            }
        }
        ParameterSet::new(entries, spec)
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub directory: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_out_dir(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; omitted means 0, recorded in the manifest either way.
    pub seed: Option<u64>,
    pub model: ModelConfig,
    #[serde(default)]
    pub paths: PathsConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub predict: PredictConfig,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    pub simulate: Option<SimulateConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn effective_seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn validate(&self) -> Result<()> {
        let spec = self.model.to_spec()?;
        let check_names = |names: &BTreeMap<String, f64>, section: &str| -> Result<()> {
            for name in names.keys() {
                if !spec.covariate_names.contains(name) {
                    return Err(Error::Config(format!(
                        "{section} names unknown covariate `{name}`"
                    )));
                }
            }
            Ok(())
        };
        check_names(&self.predict.covariates, "predict.covariates")?;
        check_names(&self.scenario.base, "scenario.base")?;
        check_names(&self.scenario.alt, "scenario.alt")?;
        if !(self.predict.horizon_days > 0.0 && self.predict.horizon_days.is_finite()) {
            return Err(Error::Config(format!(
                "predict.horizon_days must be positive, got {}",
                self.predict.horizon_days
            )));
        }
        if let Some(h) = self.scenario.horizon_days {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!(
                    "scenario.horizon_days must be positive, got {h}"
                )));
            }
        }
        if self.pipeline.detrend_window < 3 || self.pipeline.detrend_window % 2 == 0 {
            return Err(Error::Config(format!(
                "pipeline.detrend_window must be odd and at least 3, got {}",
                self.pipeline.detrend_window
            )));
        }
        if let Some(sim) = &self.simulate {
            if sim.subjects == 0 || sim.days == 0 {
                return Err(Error::Config(
                    "simulate.subjects and simulate.days must be at least 1".into(),
                ));
            }
            if sim.initial_state == 0 || sim.initial_state > spec.k() {
                return Err(Error::Config(format!(
                    "simulate.initial_state {} outside 1..={}",
                    sim.initial_state,
                    spec.k()
                )));
            }
            // Builds the parameter set purely for validation.
            sim.to_parameters(&spec)?;
        }
        Ok(())
    }
}
