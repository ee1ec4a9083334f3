//! Hazard-ratio tables, horizon forecasts, sojourn summaries, and what-if
//! scenario comparisons built on a completed fit.
//!
//! Hazard ratios are `exp(beta_hat)`: the multiplicative change in a
//! transition intensity per +1 unit (one standard deviation, for
//! standardized covariates). Confidence intervals are Wald intervals on
//! the log scale, `exp(beta_hat +- 1.96 * SE)`, so the endpoints are
//! symmetric in log space.

use crate::error::Result;
use crate::matexp::{transition_probability_matrix, ProbabilityMatrix};
use crate::model::{assemble_generator, sojourn_time, CovariateVector, ModelSpec, Transition};
use crate::optim::FitResult;

/// Normal quantile for two-sided 95% intervals.
pub const Z_95: f64 = 1.96;

/// One hazard ratio: transition, covariate, point estimate and interval.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardRatioEntry {
    pub transition: Transition,
    pub covariate: String,
    pub hr: f64,
    /// Absent when the covariance is unavailable.
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// Set when the fit did not converge, the covariance is absent, or the
    /// transition's estimates sit at a boundary.
    pub unstable: bool,
}

/// Transition probabilities over a horizon at a recorded covariate setting.
#[derive(Debug, Clone)]
pub struct HorizonForecast {
    pub horizon: f64,
    pub matrix: ProbabilityMatrix,
    /// The covariate setting used, recorded verbatim.
    pub covariates: CovariateVector,
}

/// Expected sojourn per state at a covariate setting, with a delta-method
/// interval at centred covariates when a covariance is available.
#[derive(Debug, Clone)]
pub struct SojournEntry {
    pub state: usize,
    pub label: String,
    pub days: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

/// Entrywise change in `P(t)` and per-state sojourn ratios between two
/// covariate settings.
#[derive(Debug, Clone)]
pub struct ScenarioComparison {
    pub base: HorizonForecast,
    pub alt: HorizonForecast,
    /// `P(t; z_alt) - P(t; z_base)`, K x K, row-major.
    pub probability_delta: nalgebra::DMatrix<f64>,
    /// Per state: (base sojourn, alt sojourn, alt/base ratio).
    pub sojourn: Vec<(f64, f64, f64)>,
}

/// Hazard ratios for every allowed transition and covariate, ordered by
/// transition then covariate.
///
/// `hr = exp(beta_hat)` always; intervals require the covariance. A fit
/// that did not converge marks every entry unstable.
pub fn hazard_ratios(fit: &FitResult, spec: &ModelSpec) -> Vec<HazardRatioEntry> {
    let se = fit.standard_errors();
    let mut out = Vec::with_capacity(spec.transitions.len() * spec.n_covariates());
    for (ti, t) in spec.transitions.allowed().iter().enumerate() {
        let flagged = fit.boundary_flags.get(ti).copied().unwrap_or(false);
        for (k, name) in spec.covariate_names.iter().enumerate() {
            let beta = fit.theta_hat.entry(ti).beta[k];
            let hr = beta.exp();
            let (ci_low, ci_high) = match &se {
                Some(se) => {
                    let s = se[spec.beta_index(ti, k)];
                    (
                        Some((beta - Z_95 * s).exp()),
                        Some((beta + Z_95 * s).exp()),
                    )
                }
                None => (None, None),
            };
            out.push(HazardRatioEntry {
                transition: *t,
                covariate: name.clone(),
                hr,
                ci_low,
                ci_high,
                unstable: !fit.converged || flagged || se.is_none(),
            });
        }
    }
    out
}

/// Wald interval for a single coefficient, exposed for fixture checks:
/// `exp(beta +- 1.96 * se)`.
pub fn wald_interval(beta: f64, se: f64) -> (f64, f64) {
    ((beta - Z_95 * se).exp(), (beta + Z_95 * se).exp())
}

/// `P(t)` at the fitted parameters and the given covariate setting.
pub fn predict_matrix(
    fit: &FitResult,
    spec: &ModelSpec,
    z: &CovariateVector,
    t: f64,
) -> Result<HorizonForecast> {
    let q = assemble_generator(&fit.theta_hat, z, spec)?;
    let matrix = transition_probability_matrix(&q, t)?;
    Ok(HorizonForecast {
        horizon: t,
        matrix,
        covariates: z.clone(),
    })
}

/// Expected sojourn times per state at covariate setting `z`.
///
/// Intervals are produced only at centred covariates (`z = 0`) and only
/// when the fit carries a covariance: the variance of `log(-q_rr)` is
/// propagated from the log-baseline block alone, a documented limitation.
pub fn sojourn_summary(
    fit: &FitResult,
    spec: &ModelSpec,
    z: &CovariateVector,
) -> Result<Vec<SojournEntry>> {
    let q = assemble_generator(&fit.theta_hat, z, spec)?;
    let at_zero = z.values().iter().all(|&v| v == 0.0);
    let mut out = Vec::with_capacity(spec.k());
    for r in 1..=spec.k() {
        let days = sojourn_time(&q, r);
        let mut ci = (None, None);
        if let (true, Some(cov), true) = (at_zero, fit.covariance.as_ref(), days.is_finite()) {
            // Gradient of log(sum_s exp(lb_rs)) w.r.t. each exit log
            // baseline is that exit's share of the total rate.
            let exits: Vec<usize> = spec
                .transitions
                .allowed()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.from == r)
                .map(|(ti, _)| ti)
                .collect();
            if !exits.is_empty() {
                let total: f64 = exits.iter().map(|&ti| fit.theta_hat.baseline(ti)).sum();
                let mut var = 0.0;
                for &a in &exits {
                    for &b in &exits {
                        let wa = fit.theta_hat.baseline(a) / total;
                        let wb = fit.theta_hat.baseline(b) / total;
                        var += wa
                            * wb
                            * cov[(spec.baseline_index(a), spec.baseline_index(b))];
                    }
                }
                if var >= 0.0 {
                    let half = Z_95 * var.sqrt();
                    // log sojourn = -log(total rate); the interval flips.
                    ci = (
                        Some(days * (-half).exp()),
                        Some(days * half.exp()),
                    );
                }
            }
        }
        out.push(SojournEntry {
            state: r,
            label: spec.states.label(r).to_string(),
            days,
            ci_low: ci.0,
            ci_high: ci.1,
        });
    }
    Ok(out)
}

/// Compares forecasts and sojourns between two covariate settings.
///
/// Identical settings produce exact zero deltas and unit ratios. A state
/// absorbing under both settings gets ratio 1.
pub fn scenario_compare(
    fit: &FitResult,
    spec: &ModelSpec,
    z_base: &CovariateVector,
    z_alt: &CovariateVector,
    t: f64,
) -> Result<ScenarioComparison> {
    let base = predict_matrix(fit, spec, z_base, t)?;
    let alt = predict_matrix(fit, spec, z_alt, t)?;
    let probability_delta = alt.matrix.as_matrix() - base.matrix.as_matrix();
    let q_base = assemble_generator(&fit.theta_hat, z_base, spec)?;
    let q_alt = assemble_generator(&fit.theta_hat, z_alt, spec)?;
    let sojourn = (1..=spec.k())
        .map(|r| {
            let b = sojourn_time(&q_base, r);
            let a = sojourn_time(&q_alt, r);
            let ratio = if a.is_infinite() && b.is_infinite() {
                1.0
            } else {
                a / b
            };
            (b, a, ratio)
        })
        .collect();
    Ok(ScenarioComparison {
        base,
        alt,
        probability_delta,
        sojourn,
    })
}
