//! End-to-end preprocessing: sensor series and harvest records in, panel
//! dataset out.
//!
//! Steps, in order: gap fill each sensor series, aggregate to daily means,
//! standardize the configured variables within greenhouse, forward-carry
//! weekly harvests to daily yields, cut tertiles on the reference house
//! and discretize every line-day, then join climate onto line-days and
//! emit a panel with one indicator column per non-reference greenhouse.
//!
//! Day index 0 is the earliest sensor date; harvest day indices are
//! assumed to share that origin. Line-days missing the state or any panel
//! covariate are dropped (and counted) rather than emitted incomplete.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::likelihood::{PanelDataset, PanelObservation};
use crate::model::CovariateVector;

use super::{
    aggregate_daily, assign_states, detrended_correlations, forward_carry,
    gap_fill_neighborhood, tertile_cutpoints, zscore_within_group, CorrelationMatrix, CutPoints,
    DailyRecord, HarvestRecord, RawSeries,
};

/// Knobs for the preprocessing run.
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Greenhouse whose yields define the tertile cut-points and whose
    /// indicator is omitted from the panel (the reference level).
    pub reference_group: String,
    /// Variables standardized within greenhouse (short keys).
    pub standardize: Vec<String>,
    /// Climate variables carried into the panel as covariate columns.
    pub panel_covariates: Vec<String>,
    /// Centered moving-average width for correlation screening.
    pub detrend_window: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            reference_group: "GH-3".into(),
            standardize: vec!["co2".into(), "rh".into(), "par".into()],
            panel_covariates: vec!["co2".into(), "rh".into(), "par".into()],
            detrend_window: 7,
        }
    }
}

/// Everything the preprocess stage produces.
#[derive(Debug, Clone)]
pub struct PreprocessOutput {
    /// Line-level analysis table (house-day climate joined to daily
    /// yields and states).
    pub records: Vec<DailyRecord>,
    /// The panel consumed by the fitter.
    pub panel: PanelDataset,
    pub cut_points: CutPoints,
    /// Detrended correlations over the available climate variables.
    pub correlations: Option<CorrelationMatrix>,
    /// Slots the gap filler could not recover, per series.
    pub unfilled_slots: Vec<(String, String, usize)>,
    /// Line-days dropped for missing state or covariates.
    pub dropped_rows: usize,
}

fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        x
    } else {
        format!("{x:.5e}").parse().expect("round-trip")
    }
}

/// Runs the full preprocessing pipeline.
pub fn preprocess(
    sensors: &[RawSeries],
    harvests: &[HarvestRecord],
    options: &PipelineOptions,
) -> Result<PreprocessOutput> {
    if sensors.is_empty() {
        return Err(Error::Pipeline("no sensor series".into()));
    }
    if harvests.is_empty() {
        return Err(Error::Pipeline("no harvest records".into()));
    }

    // Gap fill, then aggregate each series to daily means.
    let mut unfilled_slots = Vec::new();
    let mut daily = Vec::with_capacity(sensors.len());
    for series in sensors {
        let filled = gap_fill_neighborhood(series)?;
        if !filled.unfilled.is_empty() {
            unfilled_slots.push((
                series.greenhouse.clone(),
                series.variable.clone(),
                filled.unfilled.len(),
            ));
        }
        daily.push(aggregate_daily(&filled.series)?);
    }

    // Day 0 is the earliest sensor date anywhere.
    let day0: NaiveDate = daily
        .iter()
        .flat_map(|s| s.days.first().map(|d| d.date))
        .min()
        .expect("non-empty series");

    // House-day climate table, one row per (greenhouse, day).
    let mut climate: BTreeMap<(String, i64), DailyRecord> = BTreeMap::new();
    for series in &daily {
        for day in &series.days {
            let idx = (day.date - day0).num_days();
            let record = climate
                .entry((series.greenhouse.clone(), idx))
                .or_insert_with(|| DailyRecord::empty(&series.greenhouse, "*", idx));
            record.set_value(&series.variable, day.value)?;
        }
    }
    let mut climate_rows: Vec<DailyRecord> = climate.into_values().collect();

    // Screening correlations on the raw daily values for every variable
    // that is observed somewhere.
    let screened: Vec<&str> = super::CLIMATE_VARIABLES
        .iter()
        .copied()
        .filter(|v| climate_rows.iter().any(|r| r.value(v).is_some()))
        .collect();
    let correlations = if screened.len() >= 2 {
        match detrended_correlations(&climate_rows, &screened, options.detrend_window) {
            Ok(c) => Some(c),
            Err(err) => {
                log::warn!("correlation screening skipped: {err}");
                None
            }
        }
    } else {
        None
    };

    // Standardize within greenhouse at the house-day level.
    let standardize: Vec<&str> = options.standardize.iter().map(|s| s.as_str()).collect();
    if !standardize.is_empty() {
        zscore_within_group(&mut climate_rows, &standardize)?;
    }

    // Forward-carry harvests to daily yields per (greenhouse, line).
    let horizon = climate_rows
        .iter()
        .map(|r| r.day)
        .max()
        .map(|d| d as usize + 1)
        .unwrap_or(0);
    let mut weekly: BTreeMap<(String, String), Vec<(i64, f64)>> = BTreeMap::new();
    for h in harvests {
        weekly
            .entry((h.greenhouse.clone(), h.line.clone()))
            .or_default()
            .push((h.day, h.yield_kg));
    }
    let mut yields: BTreeMap<(String, String), Vec<Option<f64>>> = BTreeMap::new();
    for (key, mut points) in weekly {
        points.sort_by_key(|(d, _)| *d);
        yields.insert(key.clone(), forward_carry(&points, horizon)?);
    }

    // Tertiles from the reference house's carried daily yields.
    let reference: Vec<f64> = yields
        .iter()
        .filter(|((gh, _), _)| gh == &options.reference_group)
        .flat_map(|(_, days)| days.iter().flatten().copied())
        .collect();
    if reference.is_empty() {
        return Err(Error::Pipeline(format!(
            "reference greenhouse `{}` has no harvest data",
            options.reference_group
        )));
    }
    let cut_points = tertile_cutpoints(&reference)?;

    // Join climate onto line-days and discretize.
    let climate_lookup: BTreeMap<(String, i64), DailyRecord> = climate_rows
        .into_iter()
        .map(|r| ((r.greenhouse.clone(), r.day), r))
        .collect();
    let mut records = Vec::new();
    for ((greenhouse, line), days) in &yields {
        for (day, value) in days.iter().enumerate() {
            let day = day as i64;
            let mut record = DailyRecord::empty(greenhouse, line, day);
            record.yield_kg = *value;
            if let Some(v) = value {
                record.state = Some(assign_states(&[*v], &cut_points)?[0]);
            }
            if let Some(c) = climate_lookup.get(&(greenhouse.clone(), day)) {
                for var in super::CLIMATE_VARIABLES {
                    record.set_value(var, c.value(var))?;
                }
            }
            records.push(record);
        }
    }

    // Panel: configured climate covariates plus one indicator per
    // non-reference greenhouse.
    let mut houses: Vec<String> = records.iter().map(|r| r.greenhouse.clone()).collect();
    houses.sort();
    houses.dedup();
    let dummies: Vec<String> = houses
        .iter()
        .filter(|h| **h != options.reference_group)
        .cloned()
        .collect();
    let mut covariate_names: Vec<String> = options.panel_covariates.clone();
    covariate_names.extend(dummies.iter().cloned());

    let mut observations = Vec::new();
    let mut dropped_rows = 0usize;
    for record in &records {
        let state = record.state;
        let climate_values: Option<Vec<f64>> = options
            .panel_covariates
            .iter()
            .map(|v| record.value(v))
            .collect();
        match (state, climate_values) {
            (Some(state), Some(mut values)) => {
                // Panel values carry six significant digits, matching the
                // emitted CSV.
                for v in &mut values {
                    *v = round_sig6(*v);
                }
                values.extend(
                    dummies
                        .iter()
                        .map(|h| f64::from(u8::from(*h == record.greenhouse))),
                );
                observations.push(PanelObservation {
                    subject_id: format!("{}-{}", record.greenhouse, record.line),
                    time: record.day as f64,
                    state,
                    covariates: CovariateVector::new(covariate_names.clone(), values)?,
                });
            }
            _ => dropped_rows += 1,
        }
    }
    if observations.is_empty() {
        return Err(Error::Pipeline(
            "no complete line-days survived preprocessing".into(),
        ));
    }
    let panel = PanelDataset::from_observations(observations)?;

    Ok(PreprocessOutput {
        records,
        panel,
        cut_points,
        correlations,
        unfilled_slots,
        dropped_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDateTime;

    fn ts(day: u32, h: u32, m: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2024, 10, 10 + day)
            .unwrap()
            .and_hms_opt(h, m, 0)
            .unwrap()
    }

    /// Two greenhouses, two variables, 10 days of 15-minute data with a
    /// deterministic daily pattern, plus weekly harvests.
    fn fixture() -> (Vec<RawSeries>, Vec<HarvestRecord>) {
        let mut sensors = Vec::new();
        for gh in ["GH-2", "GH-3"] {
            for var in ["co2", "rh", "par"] {
                let mut points = Vec::new();
                for day in 0..10u32 {
                    for slot in 0..96u32 {
                        let d = day as f64;
                        let base = match var {
                            "co2" => 400.0 + d * 3.0 + (d * 1.3).sin() * 9.0,
                            "rh" => 70.0 - d * 0.8 + (d * 0.7).cos() * 4.0,
                            _ => 180.0 + d * 5.0 + (d * 2.1).sin() * 20.0,
                        };
                        let shift = if gh == "GH-2" { 12.0 } else { 0.0 };
                        points.push((
                            ts(day, slot / 4, (slot % 4) * 15),
                            Some(base + shift + (slot as f64 * 0.01)),
                        ));
                    }
                }
                sensors.push(RawSeries::from_points(gh, var, &points).unwrap());
            }
        }
        let mut harvests = Vec::new();
        for gh in ["GH-2", "GH-3"] {
            for line in ["1", "2", "3"] {
                for (week, base) in [(0i64, 0.3), (7, 0.9)] {
                    let bump = line.parse::<f64>().unwrap() * 0.25;
                    harvests.push(HarvestRecord {
                        greenhouse: gh.into(),
                        line: line.into(),
                        day: week,
                        yield_kg: base + bump,
                    });
                }
            }
        }
        (sensors, harvests)
    }

    #[test]
    fn preprocess_produces_a_complete_panel() {
        let (sensors, harvests) = fixture();
        let out = preprocess(&sensors, &harvests, &PipelineOptions::default()).unwrap();
        // 2 houses x 3 lines over 10 days.
        assert_eq!(out.records.len(), 60);
        assert_eq!(out.dropped_rows, 0);
        assert_eq!(out.panel.n_subjects(), 6);
        assert_eq!(out.panel.n_observations(), 60);
        // Covariates: co2, rh, par plus the GH-2 indicator.
        assert_eq!(
            out.panel.covariate_names(),
            &["co2", "rh", "par", "GH-2"]
        );
        // z-scores within house mean 0.
        for (gi, gh) in ["GH-2", "GH-3"].iter().enumerate() {
            let mut sum = 0.0;
            let mut n = 0usize;
            for subj in out.panel.subjects() {
                if subj.id.starts_with(gh) {
                    for obs in subj.observations() {
                        sum += obs.covariates[0];
                        n += 1;
                        // Indicator column marks GH-2 rows.
                        assert_eq!(obs.covariates[3], if gi == 0 { 1.0 } else { 0.0 });
                    }
                }
            }
            assert!(n > 0 && (sum / n as f64).abs() < 1e-10);
        }
        // States present throughout.
        for r in &out.records {
            assert!(r.state.is_some());
        }
        assert!(out.cut_points.lower < out.cut_points.upper);
        assert!(out.correlations.is_some());
    }

    #[test]
    fn line_days_before_first_harvest_are_dropped() {
        let (sensors, mut harvests) = fixture();
        // GH-3 line 1 only harvested from day 4.
        harvests.retain(|h| !(h.greenhouse == "GH-3" && h.line == "1" && h.day == 0));
        for h in &mut harvests {
            if h.greenhouse == "GH-3" && h.line == "1" {
                h.day = 4;
            }
        }
        let out = preprocess(&sensors, &harvests, &PipelineOptions::default()).unwrap();
        assert_eq!(out.dropped_rows, 4);
        assert_eq!(out.panel.n_observations(), 56);
        // The affected subject still has strictly increasing times.
        let subj = out
            .panel
            .subjects()
            .iter()
            .find(|s| s.id == "GH-3-1")
            .unwrap();
        assert_eq!(subj.observations()[0].time, 4.0);
    }

    #[test]
    fn missing_reference_house_is_an_error() {
        let (sensors, harvests) = fixture();
        let mut options = PipelineOptions::default();
        options.reference_group = "GH-9".into();
        assert!(preprocess(&sensors, &harvests, &options).is_err());
    }
}
