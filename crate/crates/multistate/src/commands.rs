//! Subcommand drivers: preprocess, fit, report, predict, simulate,
//! scenario.
//!
//! Every run writes its outputs plus a `manifest.json` holding the config
//! echo, content digests of all inputs and outputs, the tool version and
//! the effective seed. Nothing time- or host-dependent goes into any
//! output, so identical configs and seeds reproduce every file bit for
//! bit. Tables are CSV with six significant digits; `fit_result.json`
//! keeps full precision so downstream commands recover the exact
//! estimates.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{AlgorithmChoice, CovariateModel, ModelConfig, RunConfig};
use crate::error::{Error, Result};
use crate::inference::{
    hazard_ratios, predict_matrix, scenario_compare, sojourn_summary, HazardRatioEntry,
};
use crate::likelihood::{read_panel_csv_path, write_panel_csv_path};
use crate::model::{assemble_generator, CovariateVector, ModelSpec, ParameterSet, TransitionParams};
use crate::optim::{crude_initializer, fit, Algorithm, FitResult};
use crate::pipeline::{preprocess, read_harvest_csv, read_sensor_csv};
use crate::simulate::{sample_panel, subject_seed, CovariateTrajectory, SubjectTrajectory};

/// Stream salt separating covariate generation from path simulation.
const COVARIATE_STREAM: u64 = 0xC0C0_A7E5_7EAA_11D5;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub algorithm: Option<AlgorithmChoice>,
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Everything a subcommand needs.
pub struct CommandContext {
    pub config: RunConfig,
    pub config_text: String,
    pub overrides: Overrides,
}

impl CommandContext {
    fn out_dir(&self) -> PathBuf {
        self.overrides
            .out
            .clone()
            .unwrap_or_else(|| self.config.output.directory.clone())
    }

    fn seed(&self) -> u64 {
        self.overrides.seed.unwrap_or_else(|| self.config.effective_seed())
    }

    fn horizon(&self) -> f64 {
        self.overrides
            .horizon
            .unwrap_or(self.config.predict.horizon_days)
    }

    fn fit_result_path(&self, out_dir: &Path) -> PathBuf {
        self.config
            .paths
            .fit_result
            .clone()
            .unwrap_or_else(|| out_dir.join("fit_result.json"))
    }

    /// Covariate vector over the model's covariates with the given
    /// overrides, zero elsewhere.
    fn covariate_setting(
        &self,
        spec: &ModelSpec,
        offsets: &BTreeMap<String, f64>,
    ) -> Result<CovariateVector> {
        let values = spec
            .covariate_names
            .iter()
            .map(|n| offsets.get(n).copied().unwrap_or(0.0))
            .collect();
        CovariateVector::new(spec.covariate_names.clone(), values)
    }
}

/// Formats with six significant digits, trimming scientific notation back
/// to plain decimal where possible.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("round-trip");
    rounded.to_string()
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

#[derive(Debug, Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    algorithm: Option<String>,
    horizon_days: Option<f64>,
    output_directory: String,
    config_sha256: String,
    config: &'a str,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

/// Writes the run manifest; call after all other outputs exist.
fn write_manifest(
    ctx: &CommandContext,
    command: &str,
    out_dir: &Path,
    algorithm: Option<String>,
    horizon: Option<f64>,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
) -> Result<PathBuf> {
    let digest_of = |path: &PathBuf| -> Result<FileDigest> {
        let bytes = fs::read(path)?;
        Ok(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        })
    };
    let mut sorted_outputs: Vec<PathBuf> = outputs.to_vec();
    sorted_outputs.sort();
    let manifest = Manifest {
        tool: "multistate",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: ctx.seed(),
        algorithm,
        horizon_days: horizon,
        output_directory: out_dir.display().to_string(),
        config_sha256: sha256_hex(ctx.config_text.as_bytes()),
        config: &ctx.config_text,
        inputs: inputs.iter().map(&digest_of).collect::<Result<_>>()?,
        outputs: sorted_outputs.iter().map(&digest_of).collect::<Result<_>>()?,
    };
    let path = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization failed: {e}")))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

/// Matrix as CSV with state labels on both axes.
fn matrix_csv(labels: &[String], m: &DMatrix<f64>) -> String {
    let mut out = String::from("state");
    for l in labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    for (r, label) in labels.iter().enumerate() {
        out.push_str(label);
        for s in 0..m.ncols() {
            out.push(',');
            out.push_str(&fmt_sig6(m[(r, s)]));
        }
        out.push('\n');
    }
    out
}

fn hazard_ratio_csv(entries: &[HazardRatioEntry]) -> String {
    let mut out = String::from("transition,covariate,hr,lo,hi,unstable\n");
    for e in entries {
        let lo = e.ci_low.map(fmt_sig6).unwrap_or_default();
        let hi = e.ci_high.map(fmt_sig6).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{lo},{hi},{}\n",
            e.transition,
            e.covariate,
            fmt_sig6(e.hr),
            e.unstable
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Fit report JSON
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParameterReport {
    pub name: String,
    pub estimate: f64,
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionEstimate {
    pub transition: String,
    pub log_baseline: f64,
    pub beta: BTreeMap<String, f64>,
}

/// Full-precision fit artifact: human-readable named estimates plus the
/// machine fields downstream commands rebuild a [`FitResult`] from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub algorithm: Algorithm,
    pub converged: bool,
    pub iterations: usize,
    pub n_parameters: usize,
    pub log_likelihood: f64,
    pub aic: f64,
    /// Named estimates: baselines `q⁰(r->s)` on the natural scale with
    /// delta-method standard errors, coefficients `beta(r->s, name)` on
    /// the log scale.
    pub parameters: Vec<ParameterReport>,
    pub hessian_eigenvalues: Vec<f64>,
    pub condition_number: Option<f64>,
    pub boundary_flags: Vec<bool>,
    pub model: ModelConfig,
    pub estimates: Vec<TransitionEstimate>,
    pub covariance: Option<Vec<Vec<f64>>>,
}

impl FitReport {
    pub fn from_fit(result: &FitResult, spec: &ModelSpec) -> Self {
        let se = result.standard_errors();
        let mut parameters = Vec::with_capacity(spec.n_parameters());
        let mut estimates = Vec::with_capacity(spec.transitions.len());
        for (ti, t) in spec.transitions.allowed().iter().enumerate() {
            let entry = result.theta_hat.entry(ti);
            let q0 = entry.log_baseline.exp();
            parameters.push(ParameterReport {
                name: format!("q\u{2070}({t})"),
                estimate: q0,
                std_error: se.as_ref().map(|se| q0 * se[spec.baseline_index(ti)]),
            });
            let mut beta = BTreeMap::new();
            for (k, name) in spec.covariate_names.iter().enumerate() {
                parameters.push(ParameterReport {
                    name: format!("beta({t}, {name})"),
                    estimate: entry.beta[k],
                    std_error: se.as_ref().map(|se| se[spec.beta_index(ti, k)]),
                });
                beta.insert(name.clone(), entry.beta[k]);
            }
            estimates.push(TransitionEstimate {
                transition: t.to_string(),
                log_baseline: entry.log_baseline,
                beta,
            });
        }
        let covariance = result.covariance.as_ref().map(|c| {
            (0..c.nrows())
                .map(|i| (0..c.ncols()).map(|j| c[(i, j)]).collect())
                .collect()
        });
        Self {
            algorithm: result.algorithm,
            converged: result.converged,
            iterations: result.iterations,
            n_parameters: result.n_parameters,
            log_likelihood: result.log_likelihood,
            aic: result.aic,
            parameters,
            hessian_eigenvalues: result.hessian_eigenvalues.clone(),
            condition_number: result.condition_number,
            boundary_flags: result.boundary_flags.clone(),
            model: ModelConfig::from_spec(spec),
            estimates,
            covariance,
        }
    }

    /// Rebuilds the in-memory result; the spec must match the model echo.
    pub fn to_fit_result(&self, spec: &ModelSpec) -> Result<FitResult> {
        let echoed = self.model.to_spec()?;
        if &echoed != spec {
            return Err(Error::Config(
                "fit_result.json was produced for a different model specification".into(),
            ));
        }
        if self.estimates.len() != spec.transitions.len() {
            return Err(Error::Config(format!(
                "fit_result.json has {} transitions, model has {}",
                self.estimates.len(),
                spec.transitions.len()
            )));
        }
        let mut entries = Vec::with_capacity(self.estimates.len());
        for (t, est) in spec.transitions.allowed().iter().zip(&self.estimates) {
            if est.transition != t.to_string() {
                return Err(Error::Config(format!(
                    "fit_result.json transition order mismatch: expected {t}, found {}",
                    est.transition
                )));
            }
            let beta = spec
                .covariate_names
                .iter()
                .map(|n| {
                    est.beta.get(n).copied().ok_or_else(|| {
                        Error::Config(format!(
                            "fit_result.json is missing beta({t}, {n})"
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            entries.push(TransitionParams {
                log_baseline: est.log_baseline,
                beta,
            });
        }
        let theta_hat = ParameterSet::new(entries, spec)?;
        let covariance = match &self.covariance {
            Some(rows) => {
                let n = spec.n_parameters();
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Config(
                        "fit_result.json covariance has the wrong shape".into(),
                    ));
                }
                let mut m = DMatrix::zeros(n, n);
                for (i, row) in rows.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        m[(i, j)] = *v;
                    }
                }
                Some(m)
            }
            None => None,
        };
        Ok(FitResult {
            theta_hat,
            log_likelihood: self.log_likelihood,
            aic: self.aic,
            n_parameters: self.n_parameters,
            covariance,
            hessian_eigenvalues: self.hessian_eigenvalues.clone(),
            condition_number: self.condition_number,
            converged: self.converged,
            iterations: self.iterations,
            boundary_flags: self.boundary_flags.clone(),
            algorithm: self.algorithm,
        })
    }
}

fn load_fit_report(path: &Path) -> Result<FitReport> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Config(format!(
            "cannot read fit result `{}`: {e} (run `fit` first or set paths.fit_result)",
            path.display()
        ))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("cannot parse `{}`: {e}", path.display())))
}

fn require_path(path: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    path.clone()
        .ok_or_else(|| Error::Config(format!("config is missing paths.{what}")))
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

pub fn run_preprocess(ctx: &CommandContext) -> Result<()> {
    let out_dir = ctx.out_dir();
    fs::create_dir_all(&out_dir)?;
    let sensor_path = require_path(&ctx.config.paths.sensor, "sensor")?;
    let harvest_path = require_path(&ctx.config.paths.harvest, "harvest")?;
    let sensors = read_sensor_csv(fs::File::open(&sensor_path)?)?;
    let harvests = read_harvest_csv(fs::File::open(&harvest_path)?)?;
    let output = preprocess(&sensors, &harvests, &ctx.config.pipeline.to_options())?;

    let mut outputs = Vec::new();
    let panel_path = out_dir.join("panel.csv");
    write_panel_csv_path(&output.panel, &panel_path)?;
    outputs.push(panel_path);

    if let Some(c) = &output.correlations {
        let path = out_dir.join("correlations.csv");
        let mut text = String::from("variable");
        for v in &c.variables {
            text.push(',');
            text.push_str(v);
        }
        text.push('\n');
        for (i, v) in c.variables.iter().enumerate() {
            text.push_str(v);
            for j in 0..c.variables.len() {
                text.push(',');
                text.push_str(&fmt_sig6(c.matrix[(i, j)]));
            }
            text.push('\n');
        }
        write_text(&path, &text)?;
        outputs.push(path);
    }

    let mut summary = String::new();
    summary.push_str(&format!(
        "preprocess: {} line-days, {} panel rows over {} subjects, {} dropped\n",
        output.records.len(),
        output.panel.n_observations(),
        output.panel.n_subjects(),
        output.dropped_rows
    ));
    summary.push_str(&format!(
        "cut points: state 1 < {} kg <= state 2 <= {} kg < state 3\n",
        fmt_sig6(output.cut_points.lower),
        fmt_sig6(output.cut_points.upper)
    ));
    for (gh, var, n) in &output.unfilled_slots {
        summary.push_str(&format!("unfilled after gap fill: {gh}/{var}: {n} slots\n"));
    }
    let summary_path = out_dir.join("summary.txt");
    write_text(&summary_path, &summary)?;
    outputs.push(summary_path);

    write_manifest(
        ctx,
        "preprocess",
        &out_dir,
        None,
        None,
        &[sensor_path, harvest_path],
        &outputs,
    )?;
    print!("{summary}");
    Ok(())
}

pub fn run_fit(ctx: &CommandContext) -> Result<()> {
    let out_dir = ctx.out_dir();
    fs::create_dir_all(&out_dir)?;
    let panel_path = require_path(&ctx.config.paths.panel, "panel")?;
    let panel = read_panel_csv_path(&panel_path)?;
    let spec = ctx.config.model.to_spec()?;
    let theta0 = crude_initializer(&panel, &spec)?;
    let choice = ctx.overrides.algorithm.unwrap_or(ctx.config.fit.algorithm);

    let mut results: Vec<FitResult> = Vec::new();
    for algorithm in choice.algorithms() {
        let opts = ctx.config.fit.options_for(algorithm);
        results.push(fit(&panel, &spec, &theta0, &opts)?);
    }

    let mut outputs = Vec::new();
    let mut summary = String::new();
    if results.len() > 1 {
        let mut table = String::from("algorithm,log_likelihood,aic,converged,iterations\n");
        summary.push_str("log-likelihood and AIC by algorithm\n");
        for r in &results {
            table.push_str(&format!(
                "{},{},{},{},{}\n",
                r.algorithm,
                fmt_sig6(r.log_likelihood),
                fmt_sig6(r.aic),
                r.converged,
                r.iterations
            ));
            summary.push_str(&format!(
                "  {:<12} logLik = {:>12}  AIC = {:>12}\n",
                r.algorithm.to_string(),
                format!("{:.2}", r.log_likelihood),
                format!("{:.2}", r.aic)
            ));
        }
        let path = out_dir.join("fit_comparison.csv");
        write_text(&path, &table)?;
        outputs.push(path);
    }

    // The primary artifact is the BFGS fit when available.
    let primary = results
        .iter()
        .find(|r| r.algorithm == Algorithm::Bfgs)
        .unwrap_or(&results[0]);
    let report = FitReport::from_fit(primary, &spec);
    let path = out_dir.join("fit_result.json");
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Config(format!("fit report serialization failed: {e}")))?;
    text.push('\n');
    write_text(&path, &text)?;
    outputs.push(path);

    summary.push_str(&format!(
        "{} fit: logLik = {}, AIC = {}, {} parameters, converged = {}, {} iterations\n",
        primary.algorithm,
        fmt_sig6(primary.log_likelihood),
        fmt_sig6(primary.aic),
        primary.n_parameters,
        primary.converged,
        primary.iterations
    ));
    match (&primary.condition_number, primary.hessian_eigenvalues.first()) {
        (Some(kappa), Some(lmin)) => summary.push_str(&format!(
            "observed information: lambda_min = {}, lambda_max = {}, condition = {}\n",
            fmt_sig6(*lmin),
            fmt_sig6(*primary.hessian_eigenvalues.last().unwrap()),
            fmt_sig6(*kappa)
        )),
        _ => summary.push_str(
            "observed information not positive definite; covariance unavailable\n",
        ),
    }
    for p in &report.parameters {
        let se = p
            .std_error
            .map(|s| format!(" (se {})", fmt_sig6(s)))
            .unwrap_or_default();
        summary.push_str(&format!("  {} = {}{se}\n", p.name, fmt_sig6(p.estimate)));
    }
    for (ti, flagged) in primary.boundary_flags.iter().enumerate() {
        if *flagged {
            summary.push_str(&format!(
                "  note: {} estimates sit near a boundary; interpret with caution\n",
                spec.transitions.allowed()[ti]
            ));
        }
    }
    let summary_path = out_dir.join("summary.txt");
    write_text(&summary_path, &summary)?;
    outputs.push(summary_path);

    write_manifest(
        ctx,
        "fit",
        &out_dir,
        Some(format!("{choice:?}").to_lowercase()),
        None,
        &[panel_path],
        &outputs,
    )?;
    print!("{summary}");
    Ok(())
}

pub fn run_report(ctx: &CommandContext) -> Result<()> {
    let out_dir = ctx.out_dir();
    fs::create_dir_all(&out_dir)?;
    let spec = ctx.config.model.to_spec()?;
    let fit_path = ctx.fit_result_path(&out_dir);
    let result = load_fit_report(&fit_path)?.to_fit_result(&spec)?;
    let z = ctx.covariate_setting(&spec, &ctx.config.predict.covariates)?;
    let horizon = ctx.horizon();

    let labels = spec.states.labels().to_vec();
    let mut outputs = Vec::new();

    let q = assemble_generator(&result.theta_hat, &z, &spec)?;
    let path = out_dir.join("intensity_matrix.csv");
    write_text(&path, &matrix_csv(&labels, q.as_matrix()))?;
    outputs.push(path);

    let entries = hazard_ratios(&result, &spec);
    let path = out_dir.join("hazard_ratios.csv");
    write_text(&path, &hazard_ratio_csv(&entries))?;
    outputs.push(path);

    let forecast = predict_matrix(&result, &spec, &z, horizon)?;
    let path = out_dir.join("horizon_matrix.csv");
    write_text(&path, &matrix_csv(&labels, forecast.matrix.as_matrix()))?;
    outputs.push(path);

    let sojourns = sojourn_summary(&result, &spec, &z)?;
    let mut sojourn_csv = String::from("state,label,days,lo,hi\n");
    for s in &sojourns {
        sojourn_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            s.state,
            s.label,
            fmt_sig6(s.days),
            s.ci_low.map(fmt_sig6).unwrap_or_default(),
            s.ci_high.map(fmt_sig6).unwrap_or_default()
        ));
    }
    let path = out_dir.join("sojourn.csv");
    write_text(&path, &sojourn_csv)?;
    outputs.push(path);

    let mut summary = format!(
        "report at covariates {:?}, horizon {} days\n",
        z.values(),
        fmt_sig6(horizon)
    );
    for s in &sojourns {
        summary.push_str(&format!(
            "  expected sojourn in {} ({}): {} days\n",
            s.state,
            s.label,
            fmt_sig6(s.days)
        ));
    }
    let unstable = entries.iter().filter(|e| e.unstable).count();
    summary.push_str(&format!(
        "  hazard ratios: {} entries, {unstable} flagged unstable\n",
        entries.len()
    ));
    let summary_path = out_dir.join("summary.txt");
    write_text(&summary_path, &summary)?;
    outputs.push(summary_path);

    write_manifest(
        ctx,
        "report",
        &out_dir,
        None,
        Some(horizon),
        &[fit_path],
        &outputs,
    )?;
    print!("{summary}");
    Ok(())
}

pub fn run_predict(ctx: &CommandContext) -> Result<()> {
    let out_dir = ctx.out_dir();
    fs::create_dir_all(&out_dir)?;
    let spec = ctx.config.model.to_spec()?;
    let fit_path = ctx.fit_result_path(&out_dir);
    let result = load_fit_report(&fit_path)?.to_fit_result(&spec)?;
    let z = ctx.covariate_setting(&spec, &ctx.config.predict.covariates)?;
    let horizon = ctx.horizon();
    let forecast = predict_matrix(&result, &spec, &z, horizon)?;

    let labels = spec.states.labels().to_vec();
    let mut outputs = Vec::new();
    let path = out_dir.join("forecast.csv");
    write_text(&path, &matrix_csv(&labels, forecast.matrix.as_matrix()))?;
    outputs.push(path);

    let mut summary = format!("state probabilities after {} days\n", fmt_sig6(horizon));
    for (name, value) in z.names().iter().zip(z.values()) {
        summary.push_str(&format!("  covariate {name} = {}\n", fmt_sig6(*value)));
    }
    for r in 1..=spec.k() {
        summary.push_str(&format!("  from {}: ", spec.states.label(r)));
        let row: Vec<String> = (1..=spec.k())
            .map(|s| {
                format!(
                    "{} {}",
                    spec.states.label(s),
                    fmt_sig6(forecast.matrix.prob(r, s))
                )
            })
            .collect();
        summary.push_str(&row.join(", "));
        summary.push('\n');
    }
    let summary_path = out_dir.join("summary.txt");
    write_text(&summary_path, &summary)?;
    outputs.push(summary_path);

    write_manifest(
        ctx,
        "predict",
        &out_dir,
        None,
        Some(horizon),
        &[fit_path],
        &outputs,
    )?;
    print!("{summary}");
    Ok(())
}

pub fn run_scenario(ctx: &CommandContext) -> Result<()> {
    let out_dir = ctx.out_dir();
    fs::create_dir_all(&out_dir)?;
    let spec = ctx.config.model.to_spec()?;
    let fit_path = ctx.fit_result_path(&out_dir);
    let result = load_fit_report(&fit_path)?.to_fit_result(&spec)?;
    let z_base = ctx.covariate_setting(&spec, &ctx.config.scenario.base)?;
    let z_alt = ctx.covariate_setting(&spec, &ctx.config.scenario.alt)?;
    let horizon = ctx
        .overrides
        .horizon
        .or(ctx.config.scenario.horizon_days)
        .unwrap_or(ctx.config.predict.horizon_days);
    let comparison = scenario_compare(&result, &spec, &z_base, &z_alt, horizon)?;

    let labels = spec.states.labels().to_vec();
    let mut outputs = Vec::new();
    for (name, matrix) in [
        ("scenario_base.csv", comparison.base.matrix.as_matrix()),
        ("scenario_alt.csv", comparison.alt.matrix.as_matrix()),
        ("scenario_delta.csv", &comparison.probability_delta),
    ] {
        let path = out_dir.join(name);
        write_text(&path, &matrix_csv(&labels, matrix))?;
        outputs.push(path);
    }
    let mut sojourn_csv = String::from("state,label,base_days,alt_days,ratio\n");
    for (r, (base, alt, ratio)) in comparison.sojourn.iter().enumerate() {
        sojourn_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r + 1,
            labels[r],
            fmt_sig6(*base),
            fmt_sig6(*alt),
            fmt_sig6(*ratio)
        ));
    }
    let path = out_dir.join("scenario_sojourn.csv");
    write_text(&path, &sojourn_csv)?;
    outputs.push(path);

    let mut summary = format!("scenario over {} days\n", fmt_sig6(horizon));
    for (r, (base, alt, ratio)) in comparison.sojourn.iter().enumerate() {
        summary.push_str(&format!(
            "  {}: sojourn {} -> {} days (ratio {})\n",
            labels[r],
            fmt_sig6(*base),
            fmt_sig6(*alt),
            fmt_sig6(*ratio)
        ));
    }
    let summary_path = out_dir.join("summary.txt");
    write_text(&summary_path, &summary)?;
    outputs.push(summary_path);

    write_manifest(
        ctx,
        "scenario",
        &out_dir,
        None,
        Some(horizon),
        &[fit_path],
        &outputs,
    )?;
    print!("{summary}");
    Ok(())
}

pub fn run_simulate(ctx: &CommandContext) -> Result<()> {
    let out_dir = ctx.out_dir();
    fs::create_dir_all(&out_dir)?;
    let spec = ctx.config.model.to_spec()?;
    let sim = ctx
        .config
        .simulate
        .as_ref()
        .ok_or_else(|| Error::Config("config is missing the [simulate] section".into()))?;
    let theta = sim.to_parameters(&spec)?;
    let seed = ctx.seed();

    let subjects: Vec<SubjectTrajectory> = (0..sim.subjects)
        .map(|i| {
            let days = generate_covariate_days(sim.covariate_model, &spec, seed, i, sim.days);
            Ok(SubjectTrajectory {
                subject_id: format!("sim-{i:04}"),
                initial_state: sim.initial_state,
                trajectory: CovariateTrajectory::new(days, &spec)?,
            })
        })
        .collect::<Result<_>>()?;
    let times: Vec<f64> = (0..sim.days).map(|d| d as f64).collect();
    let panel = sample_panel(&theta, &spec, &subjects, &times, seed)?;

    let mut outputs = Vec::new();
    let panel_path = out_dir.join("panel.csv");
    write_panel_csv_path(&panel, &panel_path)?;
    outputs.push(panel_path);

    let summary = format!(
        "simulated {} subjects over {} days ({} records, seed {seed})\n",
        sim.subjects,
        sim.days,
        panel.n_observations()
    );
    let summary_path = out_dir.join("summary.txt");
    write_text(&summary_path, &summary)?;
    outputs.push(summary_path);

    write_manifest(ctx, "simulate", &out_dir, None, None, &[], &outputs)?;
    print!("{summary}");
    Ok(())
}

/// Daily covariate vectors for one simulated subject.
fn generate_covariate_days(
    model: CovariateModel,
    spec: &ModelSpec,
    seed: u64,
    subject_index: usize,
    days: usize,
) -> Vec<CovariateVector> {
    match model {
        CovariateModel::Zeros => {
            vec![CovariateVector::zeros(&spec.covariate_names); days]
        }
        CovariateModel::Gaussian => {
            let mut rng =
                ChaCha12Rng::seed_from_u64(subject_seed(seed ^ COVARIATE_STREAM, subject_index));
            (0..days)
                .map(|_| {
                    let values = (0..spec.n_covariates())
                        .map(|_| rand::Rng::sample(&mut rng, rand_distr::StandardNormal))
                        .collect();
                    CovariateVector::new(spec.covariate_names.clone(), values)
                        .expect("normal draws are finite")
                })
                .collect()
        }
    }
}

/// Loads `path`, parses and validates the config, and returns the context.
pub fn load_context(config_path: &Path, overrides: Overrides) -> Result<CommandContext> {
    let config_text = fs::read_to_string(config_path).map_err(|e| {
        Error::Config(format!("cannot read config `{}`: {e}", config_path.display()))
    })?;
    let config = crate::config::parse_config(&config_text)?;
    Ok(CommandContext {
        config,
        config_text,
        overrides,
    })
}
