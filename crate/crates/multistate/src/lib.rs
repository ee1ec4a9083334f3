//! Continuous-time multi-state (Markov) models for panel-observed ordinal
//! state processes with time-varying covariates.
//!
//! The crate covers the full workflow for daily yield-state data:
//!
//! - [`pipeline`]: raw sensor/harvest streams to an analysis panel
//!   (gap filling, daily aggregation, within-group standardization,
//!   tertile state discretization, correlation screening);
//! - [`model`]: state space, allowed transitions, log-linear covariate
//!   effects, generator-matrix assembly, sojourns and jump distributions;
//! - [`matexp`]: transition probabilities `P(t) = exp(tQ)` with an
//!   independent uniformization cross-check;
//! - [`likelihood`]: panel log-likelihood with covariates held at interval
//!   left endpoints, plus numerical gradients;
//! - [`optim`]: BFGS and Nelder-Mead maximum likelihood with
//!   observed-information standard errors;
//! - [`inference`]: hazard ratios with Wald intervals, horizon forecasts,
//!   sojourn summaries and scenario comparisons;
//! - [`simulate`]: exact event-driven simulation under daily piecewise
//!   constant covariates, the test oracle and what-if engine.
//!
//! The `examples/` directory walks through each capability; the
//! `multistate` binary wires them into config-driven runs.

pub mod commands;
pub mod config;
pub mod error;
pub mod inference;
pub mod likelihood;
pub mod matexp;
pub mod model;
pub mod optim;
pub mod pipeline;
pub mod simulate;

pub use error::{Error, ErrorCategory, Result};
pub use inference::{
    hazard_ratios, predict_matrix, scenario_compare, sojourn_summary, HazardRatioEntry,
    HorizonForecast,
};
pub use likelihood::{
    interval_log_likelihood, numerical_gradient, read_panel_csv, total_log_likelihood,
    write_panel_csv, PanelDataset, PanelObservation,
};
pub use matexp::{transition_probability_matrix, uniformization_oracle, ProbabilityMatrix};
pub use model::{
    assemble_generator, next_state_distribution, sojourn_time, CovariateVector, GeneratorMatrix,
    ModelSpec, ParameterSet, StateSpace, Transition, TransitionParams, TransitionStructure,
};
pub use optim::{
    aic, crude_initializer, fit, observed_information, Algorithm, FitOptions, FitResult,
    ObservedInformation,
};
pub use simulate::{sample_panel, simulate_path, CovariateTrajectory, SimulatedPath, SubjectTrajectory};
