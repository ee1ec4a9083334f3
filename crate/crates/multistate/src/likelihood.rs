//! Panel-data log-likelihood and its numerical gradient.
//!
//! The process is observed only at discrete times; between consecutive
//! observations of a subject the chain evolves unobserved under the
//! generator assembled from the covariates at the interval's *left*
//! endpoint (covariates are treated as piecewise constant). Each interval
//! contributes `log P(dt; Q(z_left))[from, to]`, and the total is the sum
//! over subjects and intervals.
//!
//! Subjects are reduced in a fixed canonical order (lexicographic by id),
//! so the total is invariant to the ordering of the input records. Within
//! one evaluation, probability matrices are cached per distinct
//! `(dt, z)` pair keyed on exact bit patterns, which makes daily panels
//! with shared covariate values cheap to score.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matexp::transition_probability_matrix;
use crate::model::{assemble_generator_aligned, CovariateVector, ModelSpec, ParameterSet};

/// One panel record: a subject's state and covariates at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelObservation {
    pub subject_id: String,
    /// Time in days.
    pub time: f64,
    /// Observed state, 1-based.
    pub state: usize,
    pub covariates: CovariateVector,
}

/// Compact per-subject storage with covariates aligned to the dataset's
/// column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Subject {
    pub id: String,
    observations: Vec<AlignedObservation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignedObservation {
    pub time: f64,
    pub state: usize,
    pub covariates: Vec<f64>,
}

impl Subject {
    pub fn observations(&self) -> &[AlignedObservation] {
        &self.observations
    }
}

/// Panel dataset: subjects in lexicographic id order, observations in
/// strictly increasing time order within each subject.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset {
    covariate_names: Vec<String>,
    subjects: Vec<Subject>,
}

impl PanelDataset {
    pub fn from_observations(records: Vec<PanelObservation>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidPanel("no observations".into()));
        }
        let covariate_names: Vec<String> = records[0].covariates.names().to_vec();
        let mut groups: std::collections::BTreeMap<String, Vec<AlignedObservation>> =
            std::collections::BTreeMap::new();
        for rec in &records {
            if !rec.time.is_finite() {
                return Err(Error::InvalidPanel(format!(
                    "subject `{}` has non-finite time {}",
                    rec.subject_id, rec.time
                )));
            }
            if rec.state == 0 {
                return Err(Error::InvalidPanel(format!(
                    "subject `{}` at time {} has state 0; states are 1-based",
                    rec.subject_id, rec.time
                )));
            }
            let aligned = rec.covariates.aligned_to(&covariate_names).map_err(|_| {
                Error::InvalidPanel(format!(
                    "subject `{}` at time {} has covariate names inconsistent with the rest of the panel",
                    rec.subject_id, rec.time
                ))
            })?;
            if rec.covariates.names().len() != covariate_names.len() {
                return Err(Error::InvalidPanel(format!(
                    "subject `{}` at time {} has a different covariate count",
                    rec.subject_id, rec.time
                )));
            }
            groups
                .entry(rec.subject_id.clone())
                .or_default()
                .push(AlignedObservation {
                    time: rec.time,
                    state: rec.state,
                    covariates: aligned,
                });
        }
        let mut subjects = Vec::with_capacity(groups.len());
        for (id, mut obs) in groups {
            obs.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap());
            for w in obs.windows(2) {
                if w[1].time <= w[0].time {
                    return Err(Error::InvalidPanel(format!(
                        "subject `{id}` has non-increasing times {} and {}",
                        w[0].time, w[1].time
                    )));
                }
            }
            subjects.push(Subject { id, observations: obs });
        }
        Ok(Self {
            covariate_names,
            subjects,
        })
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    pub fn n_subjects(&self) -> usize {
        self.subjects.len()
    }

    pub fn n_observations(&self) -> usize {
        self.subjects.iter().map(|s| s.observations.len()).sum()
    }

    /// Number of consecutive observation pairs contributing to the
    /// likelihood.
    pub fn n_intervals(&self) -> usize {
        self.subjects
            .iter()
            .map(|s| s.observations.len().saturating_sub(1))
            .sum()
    }

    /// Expands back to flat records, in canonical order.
    pub fn to_observations(&self) -> Vec<PanelObservation> {
        let mut out = Vec::with_capacity(self.n_observations());
        for subj in &self.subjects {
            for obs in &subj.observations {
                out.push(PanelObservation {
                    subject_id: subj.id.clone(),
                    time: obs.time,
                    state: obs.state,
                    covariates: CovariateVector::new(
                        self.covariate_names.clone(),
                        obs.covariates.clone(),
                    )
                    .expect("stored covariates are finite"),
                });
            }
        }
        out
    }

    /// Column indices of `spec`'s covariates within this dataset, erroring
    /// on any the panel does not carry. Extra panel columns are fine; the
    /// model simply ignores them.
    pub fn column_map(&self, spec: &ModelSpec) -> Result<Vec<usize>> {
        spec.covariate_names
            .iter()
            .map(|n| {
                self.covariate_names
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| Error::MissingCovariate { name: n.clone() })
            })
            .collect()
    }

    fn check_states(&self, spec: &ModelSpec) -> Result<()> {
        for subj in &self.subjects {
            for obs in &subj.observations {
                if obs.state > spec.k() {
                    return Err(Error::InvalidPanel(format!(
                        "subject `{}` at time {} has state {} outside 1..={}",
                        subj.id,
                        obs.time,
                        obs.state,
                        spec.k()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Log-likelihood of one observed interval: `log P(dt; Q(z_from))[from, to]`
/// with covariates held at the left endpoint.
///
/// A structurally impossible observed move (probability exactly zero) is an
/// error carrying the subject and interval times.
pub fn interval_log_likelihood(
    from: &PanelObservation,
    to: &PanelObservation,
    theta: &ParameterSet,
    spec: &ModelSpec,
) -> Result<f64> {
    if from.subject_id != to.subject_id {
        return Err(Error::InvalidPanel(format!(
            "interval endpoints belong to different subjects `{}` and `{}`",
            from.subject_id, to.subject_id
        )));
    }
    if to.time <= from.time {
        return Err(Error::InvalidPanel(format!(
            "interval must move forward in time: {} to {}",
            from.time, to.time
        )));
    }
    spec.states.check_state(from.state)?;
    spec.states.check_state(to.state)?;
    theta.validate(spec)?;
    let z = from.covariates.aligned_to(&spec.covariate_names)?;
    let q = assemble_generator_aligned(theta, &z, spec);
    let p = transition_probability_matrix(&q, to.time - from.time)?;
    let prob = p.prob(from.state, to.state);
    if prob == 0.0 {
        return Err(Error::ImpossibleTransition {
            subject: from.subject_id.clone(),
            from_time: from.time,
            to_time: to.time,
            from_state: from.state,
            to_state: to.state,
        });
    }
    Ok(prob.ln())
}

#[derive(PartialEq, Eq, Hash)]
struct IntervalKey {
    dt_bits: u64,
    z_bits: Vec<u64>,
}

/// Total panel log-likelihood: the sum of interval contributions over all
/// subjects, reduced in canonical subject order.
///
/// Transition matrices are cached per distinct `(dt, z)` within the call;
/// keys match on exact bit patterns only. An observed move with probability
/// exactly zero aborts the evaluation with the offending interval.
pub fn total_log_likelihood(
    data: &PanelDataset,
    theta: &ParameterSet,
    spec: &ModelSpec,
) -> Result<f64> {
    theta.validate(spec)?;
    data.check_states(spec)?;
    let columns = data.column_map(spec)?;
    let mut cache: HashMap<IntervalKey, crate::matexp::ProbabilityMatrix> = HashMap::new();
    let mut z = vec![0.0; columns.len()];
    let mut total = 0.0;
    for subj in data.subjects() {
        let mut subtotal = 0.0;
        for w in subj.observations().windows(2) {
            let (from, to) = (&w[0], &w[1]);
            for (zi, &c) in z.iter_mut().zip(&columns) {
                *zi = from.covariates[c];
            }
            let dt = to.time - from.time;
            let key = IntervalKey {
                dt_bits: dt.to_bits(),
                z_bits: z.iter().map(|v| v.to_bits()).collect(),
            };
            let p = match cache.entry(key) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(e) => {
                    let q = assemble_generator_aligned(theta, &z, spec);
                    e.insert(transition_probability_matrix(&q, dt)?)
                }
            };
            let prob = p.prob(from.state, to.state);
            if prob == 0.0 {
                return Err(Error::ImpossibleTransition {
                    subject: subj.id.clone(),
                    from_time: from.time,
                    to_time: to.time,
                    from_state: from.state,
                    to_state: to.state,
                });
            }
            subtotal += prob.ln();
        }
        total += subtotal;
    }
    Ok(total)
}

/// Central-difference gradient with per-coordinate step
/// `scale * max(1, |theta_j|)`.
///
/// A non-finite objective value at a probe point shrinks that coordinate's
/// step once by a factor of 10; if a probe is still non-finite the gradient
/// fails naming the coordinate.
pub fn numerical_gradient_with_scale(
    f: impl Fn(&[f64]) -> f64,
    theta: &[f64],
    scale: f64,
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; theta.len()];
    let mut x = theta.to_vec();
    for j in 0..theta.len() {
        let h0 = scale * theta[j].abs().max(1.0);
        let mut done = false;
        for h in [h0, h0 / 10.0] {
            x[j] = theta[j] + h;
            let fp = f(&x);
            x[j] = theta[j] - h;
            let fm = f(&x);
            x[j] = theta[j];
            if fp.is_finite() && fm.is_finite() {
                grad[j] = (fp - fm) / (2.0 * h);
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::NonFiniteObjective { coordinate: j });
        }
    }
    Ok(grad)
}

/// Central-difference gradient at the default step `1e-6 * max(1, |theta_j|)`.
pub fn numerical_gradient(f: impl Fn(&[f64]) -> f64, theta: &[f64]) -> Result<Vec<f64>> {
    numerical_gradient_with_scale(f, theta, 1e-6)
}

// ---------------------------------------------------------------------------
// Long-format CSV: subject_id, time, state, then one column per covariate.
// ---------------------------------------------------------------------------

/// Reads a panel from long-format CSV. The header is required; every
/// column after `state` is taken as a covariate.
pub fn read_panel_csv<R: Read>(reader: R) -> Result<PanelDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 3 || cols[0] != "subject_id" || cols[1] != "time" || cols[2] != "state" {
        return Err(Error::InvalidPanel(
            "panel csv must start with columns subject_id,time,state".into(),
        ));
    }
    let covariate_names: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();
    let mut records = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let parse_f64 = |field: &str, what: &str| -> Result<f64> {
            field.trim().parse::<f64>().map_err(|_| {
                Error::InvalidPanel(format!(
                    "row {}: cannot parse {what} from `{field}`",
                    line + 2
                ))
            })
        };
        let time = parse_f64(&row[1], "time")?;
        let state: usize = row[2].trim().parse().map_err(|_| {
            Error::InvalidPanel(format!("row {}: cannot parse state from `{}`", line + 2, &row[2]))
        })?;
        let values: Vec<f64> = (3..row.len())
            .map(|i| parse_f64(&row[i], &format!("covariate `{}`", covariate_names[i - 3])))
            .collect::<Result<_>>()?;
        records.push(PanelObservation {
            subject_id: row[0].to_string(),
            time,
            state,
            covariates: CovariateVector::new(covariate_names.clone(), values)?,
        });
    }
    PanelDataset::from_observations(records)
}

pub fn read_panel_csv_path(path: &Path) -> Result<PanelDataset> {
    read_panel_csv(std::fs::File::open(path)?)
}

/// Writes a panel as long-format CSV. Floats use the shortest
/// representation that parses back to the same bits, so a write/read/write
/// cycle is byte-identical.
pub fn write_panel_csv<W: Write>(data: &PanelDataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["subject_id".to_string(), "time".into(), "state".into()];
    header.extend(data.covariate_names().iter().cloned());
    wtr.write_record(&header)?;
    for subj in data.subjects() {
        for obs in subj.observations() {
            let mut row = vec![subj.id.clone(), obs.time.to_string(), obs.state.to_string()];
            row.extend(obs.covariates.iter().map(|v| v.to_string()));
            wtr.write_record(&row)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_panel_csv_path(data: &PanelDataset, path: &Path) -> Result<()> {
    write_panel_csv(data, std::fs::File::create(path)?)
}
