//! Maximum-likelihood fitting: BFGS (primary), Nelder-Mead (robustness
//! check), crude initialization, and observed-information diagnostics.
//!
//! Both algorithms minimize the negative panel log-likelihood over the flat
//! parameter layout (per transition: log baseline, then coefficients).
//! Standard errors come from a finite-difference Hessian of the negative
//! log-likelihood at the optimum, not from the optimizer's internal
//! approximation.

mod bfgs;
mod nelder_mead;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::{numerical_gradient, total_log_likelihood, PanelDataset};
use crate::model::{ModelSpec, ParameterSet, TransitionParams};

pub use bfgs::minimize_bfgs;
pub use nelder_mead::minimize_nelder_mead;

/// Fitted baselines below this (day^-1) are flagged as boundary estimates.
pub const BASELINE_BOUNDARY: f64 = 1e-6;
/// Coefficients beyond this magnitude are flagged as boundary estimates.
pub const BETA_BOUNDARY: f64 = 10.0;
/// Crude-initializer floor for baseline intensities (day^-1).
pub const INITIALIZER_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Bfgs,
    NelderMead,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::Bfgs => write!(f, "BFGS"),
            Algorithm::NelderMead => write!(f, "Nelder-Mead"),
        }
    }
}

/// Deterministic optimizer settings. `max_iterations` counts BFGS
/// iterations or Nelder-Mead objective evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub algorithm: Algorithm,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub function_tolerance: f64,
}

impl FitOptions {
    /// BFGS defaults: 500 iterations, gradient infinity-norm below 1e-6 or
    /// relative objective change below 1e-9.
    pub fn bfgs() -> Self {
        Self {
            algorithm: Algorithm::Bfgs,
            max_iterations: 500,
            gradient_tolerance: 1e-6,
            function_tolerance: 1e-9,
        }
    }

    /// Nelder-Mead defaults: 5000 evaluations, objective spread below 1e-8.
    pub fn nelder_mead() -> Self {
        Self {
            algorithm: Algorithm::NelderMead,
            max_iterations: 5000,
            gradient_tolerance: 1e-6,
            function_tolerance: 1e-8,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::OptimizationFailed(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.gradient_tolerance > 0.0 && self.function_tolerance > 0.0) {
            return Err(Error::OptimizationFailed(
                "tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome shared by both minimizers.
#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Estimates plus fit and identifiability diagnostics.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub theta_hat: ParameterSet,
    pub log_likelihood: f64,
    pub aic: f64,
    pub n_parameters: usize,
    /// Inverse observed information; present only when the Hessian is
    /// positive definite.
    pub covariance: Option<DMatrix<f64>>,
    /// Eigenvalues of the symmetrized Hessian, ascending. Empty if the
    /// Hessian could not be evaluated.
    pub hessian_eigenvalues: Vec<f64>,
    /// lambda_max / lambda_min, defined only when lambda_min > 0.
    pub condition_number: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// One flag per allowed transition: baseline below [`BASELINE_BOUNDARY`]
    /// or any coefficient beyond [`BETA_BOUNDARY`].
    pub boundary_flags: Vec<bool>,
    pub algorithm: Algorithm,
}

impl FitResult {
    /// Standard errors from the covariance diagonal, in flat layout order.
    pub fn standard_errors(&self) -> Option<Vec<f64>> {
        self.covariance
            .as_ref()
            .map(|c| (0..c.nrows()).map(|i| c[(i, i)].sqrt()).collect())
    }

    pub fn is_identified(&self) -> bool {
        self.covariance.is_some()
    }
}

/// Akaike information criterion: `2k - 2 * log_likelihood`.
pub fn aic(n_parameters: usize, log_likelihood: f64) -> f64 {
    2.0 * n_parameters as f64 - 2.0 * log_likelihood
}

/// Negative log-likelihood over the flat layout; invalid or impossible
/// parameter points map to +infinity so line searches reject them.
pub fn negative_log_likelihood<'a>(
    data: &'a PanelDataset,
    spec: &'a ModelSpec,
) -> impl Fn(&[f64]) -> f64 + 'a {
    move |flat| match ParameterSet::from_flat(flat, spec) {
        Ok(theta) => match total_log_likelihood(data, &theta, spec) {
            Ok(ll) => -ll,
            Err(_) => f64::INFINITY,
        },
        Err(_) => f64::INFINITY,
    }
}

/// Occurrence/exposure starting values: for each allowed transition,
/// `q0_rs` is the count of observed direct r->s interval moves divided by
/// the total observed time spent with left state r, floored at
/// [`INITIALIZER_FLOOR`]; all coefficients start at zero.
///
/// A state never occupied as a left endpoint gets floor baselines on all
/// its exits, with a warning.
pub fn crude_initializer(data: &PanelDataset, spec: &ModelSpec) -> Result<ParameterSet> {
    let transitions = spec.transitions.allowed();
    let mut moves = vec![0usize; transitions.len()];
    let mut exposure = vec![0.0f64; spec.k() + 1];
    for subj in data.subjects() {
        for w in subj.observations().windows(2) {
            let (from, to) = (&w[0], &w[1]);
            if from.state > spec.k() || to.state > spec.k() {
                return Err(Error::InvalidPanel(format!(
                    "subject `{}` has state outside 1..={}",
                    subj.id,
                    spec.k()
                )));
            }
            exposure[from.state] += to.time - from.time;
            if from.state != to.state {
                if let Some(ti) = transitions
                    .iter()
                    .position(|t| t.from == from.state && t.to == to.state)
                {
                    moves[ti] += 1;
                }
            }
        }
    }
    for r in 1..=spec.k() {
        if exposure[r] == 0.0 && transitions.iter().any(|t| t.from == r) {
            log::warn!(
                "state {r} never observed as an interval start; its exit baselines start at the floor {INITIALIZER_FLOOR}"
            );
        }
    }
    let p = spec.n_covariates();
    let entries = transitions
        .iter()
        .enumerate()
        .map(|(ti, t)| {
            let rate = if exposure[t.from] > 0.0 {
                (moves[ti] as f64 / exposure[t.from]).max(INITIALIZER_FLOOR)
            } else {
                INITIALIZER_FLOOR
            };
            TransitionParams {
                log_baseline: rate.ln(),
                beta: vec![0.0; p],
            }
        })
        .collect();
    ParameterSet::new(entries, spec)
}

/// Maximum-likelihood fit from `theta0`.
///
/// The start must score a finite log-likelihood. Unrecoverable non-finite
/// values mid-run end the fit at the last good iterate with
/// `converged = false`; hitting the iteration cap does the same.
pub fn fit(
    data: &PanelDataset,
    spec: &ModelSpec,
    theta0: &ParameterSet,
    opts: &FitOptions,
) -> Result<FitResult> {
    opts.validate()?;
    theta0.validate(spec)?;
    let objective = negative_log_likelihood(data, spec);
    let x0 = theta0.to_flat();
    let f0 = objective(&x0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteStart(f0));
    }
    let outcome = match opts.algorithm {
        Algorithm::Bfgs => minimize_bfgs(&objective, &x0, opts)?,
        Algorithm::NelderMead => minimize_nelder_mead(&objective, &x0, opts),
    };
    let theta_hat = ParameterSet::from_flat(&outcome.x, spec)?;
    let log_likelihood = -outcome.f;
    let n_parameters = spec.n_parameters();
    let aic = aic(n_parameters, log_likelihood);

    let info = match observed_information(data, spec, &theta_hat) {
        Ok(info) => Some(info),
        Err(err) => {
            log::warn!("observed-information evaluation failed: {err}");
            None
        }
    };
    let (hessian_eigenvalues, condition_number, covariance) = match info {
        Some(i) => (i.eigenvalues, i.condition_number, i.covariance),
        None => (Vec::new(), None, None),
    };

    let boundary_flags = theta_hat
        .entries()
        .iter()
        .map(|e| e.log_baseline.exp() < BASELINE_BOUNDARY || e.beta.iter().any(|b| b.abs() > BETA_BOUNDARY))
        .collect();

    Ok(FitResult {
        theta_hat,
        log_likelihood,
        aic,
        n_parameters,
        covariance,
        hessian_eigenvalues,
        condition_number,
        converged: outcome.converged,
        iterations: outcome.iterations,
        boundary_flags,
        algorithm: opts.algorithm,
    })
}

/// Hessian by central differences of the central-difference gradient, with
/// outer step `1e-3 * max(1, |theta_j|)` per coordinate.
pub fn numerical_hessian(f: impl Fn(&[f64]) -> f64, theta: &[f64]) -> Result<DMatrix<f64>> {
    let n = theta.len();
    let mut h = DMatrix::zeros(n, n);
    let mut x = theta.to_vec();
    for j in 0..n {
        let step = 1e-3 * theta[j].abs().max(1.0);
        x[j] = theta[j] + step;
        let g_plus = numerical_gradient(&f, &x)?;
        x[j] = theta[j] - step;
        let g_minus = numerical_gradient(&f, &x)?;
        x[j] = theta[j];
        for i in 0..n {
            h[(i, j)] = (g_plus[i] - g_minus[i]) / (2.0 * step);
        }
    }
    Ok(h)
}

/// Curvature diagnostics at a point: symmetrized Hessian, eigenvalues,
/// condition number, and the inverse when positive definite.
#[derive(Debug, Clone)]
pub struct ObservedInformation {
    pub hessian: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub condition_number: Option<f64>,
    pub covariance: Option<DMatrix<f64>>,
}

impl ObservedInformation {
    /// Diagnostics for an arbitrary objective (minimization sense).
    pub fn from_objective(f: impl Fn(&[f64]) -> f64, theta: &[f64]) -> Result<Self> {
        let raw = numerical_hessian(f, theta)?;
        let hessian = (&raw + raw.transpose()) * 0.5;
        let eig = hessian.clone().symmetric_eigen();
        let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let lambda_min = *eigenvalues.first().expect("at least one parameter");
        let lambda_max = *eigenvalues.last().unwrap();
        let (condition_number, covariance) = if lambda_min > 0.0 {
            let cov = nalgebra::Cholesky::new(hessian.clone()).map(|c| c.inverse());
            (Some(lambda_max / lambda_min), cov)
        } else {
            (None, None)
        };
        Ok(Self {
            hessian,
            eigenvalues,
            condition_number,
            covariance,
        })
    }
}

/// Observed information of the fitted model: the Hessian of the negative
/// log-likelihood at `theta_hat`.
pub fn observed_information(
    data: &PanelDataset,
    spec: &ModelSpec,
    theta_hat: &ParameterSet,
) -> Result<ObservedInformation> {
    theta_hat.validate(spec)?;
    let objective = negative_log_likelihood(data, spec);
    ObservedInformation::from_objective(objective, &theta_hat.to_flat())
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[allow(dead_code)]
pub(crate) fn as_dvector(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}
