//! Preprocessing: raw sensor and harvest streams to the analysis table.
//!
//! The stages mirror the data flow: 15-minute sensor logs are gap-filled
//! from the same time slot on neighbouring days, averaged to hourly and
//! then daily means, and standardized within greenhouse; weekly harvest
//! weights are forward-carried to daily values and discretized into three
//! yield states using tertile cut-points taken from a reference house.
//! Detrended within-group correlations support covariate screening.

mod driver;
mod ingest;

pub use driver::{preprocess, PipelineOptions, PreprocessOutput};
pub use ingest::{read_harvest_csv, read_sensor_csv, HarvestRecord};

use chrono::{NaiveDate, NaiveDateTime, Timelike};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Short variable keys used in sensor files and panel columns, in the
/// order they appear in [`DailyRecord`].
pub const CLIMATE_VARIABLES: [&str; 5] = ["co2", "rh", "par", "temp", "water"];

/// A regular-cadence sensor series for one variable in one greenhouse.
/// Missing readings (absent rows or blank values) are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub greenhouse: String,
    pub variable: String,
    start: NaiveDateTime,
    cadence_seconds: i64,
    values: Vec<Option<f64>>,
}

impl RawSeries {
    /// Builds a series from timestamped points. Timestamps must be
    /// strictly increasing; the cadence is inferred as the greatest common
    /// divisor of the gaps and absent grid slots become missing values.
    pub fn from_points(
        greenhouse: &str,
        variable: &str,
        points: &[(NaiveDateTime, Option<f64>)],
    ) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Pipeline(format!(
                "series {greenhouse}/{variable}: need at least 2 timestamps to infer cadence"
            )));
        }
        let mut gaps = Vec::with_capacity(points.len() - 1);
        for w in points.windows(2) {
            let gap = (w[1].0 - w[0].0).num_seconds();
            if gap <= 0 {
                return Err(Error::Pipeline(format!(
                    "series {greenhouse}/{variable}: timestamps not strictly increasing at {}",
                    w[1].0
                )));
            }
            gaps.push(gap);
        }
        let cadence = gaps.iter().fold(0i64, |acc, &g| gcd(acc, g));
        let start = points[0].0;
        let span = (points.last().unwrap().0 - start).num_seconds();
        let n = (span / cadence) as usize + 1;
        let mut values = vec![None; n];
        for (ts, v) in points {
            let idx = ((*ts - start).num_seconds() / cadence) as usize;
            values[idx] = *v;
        }
        Ok(Self {
            greenhouse: greenhouse.to_string(),
            variable: variable.to_string(),
            start,
            cadence_seconds: cadence,
            values,
        })
    }

    pub fn cadence_seconds(&self) -> i64 {
        self.cadence_seconds
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn timestamp(&self, idx: usize) -> NaiveDateTime {
        self.start + chrono::Duration::seconds(self.cadence_seconds * idx as i64)
    }

    fn slots_per_day(&self) -> Result<usize> {
        if 86_400 % self.cadence_seconds != 0 {
            return Err(Error::Pipeline(format!(
                "series {}/{}: cadence {}s does not divide one day",
                self.greenhouse, self.variable, self.cadence_seconds
            )));
        }
        Ok((86_400 / self.cadence_seconds) as usize)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if a == 0 {
        b
    } else {
        gcd(b % a, a)
    }
}

/// Result of gap filling: the filled series plus the slots that stayed
/// missing because all six neighbours were missing too.
#[derive(Debug, Clone)]
pub struct GapFillResult {
    pub series: RawSeries,
    pub unfilled: Vec<NaiveDateTime>,
}

/// Three-day neighbourhood smoother: a missing slot inherits the mean of
/// the same time of day at offsets -3..-1 and +1..+3 days, using whichever
/// of the six neighbours are observed. Observed values are never altered.
pub fn gap_fill_neighborhood(raw: &RawSeries) -> Result<GapFillResult> {
    let spd = raw.slots_per_day()?;
    let original = raw.values.clone();
    let mut filled = raw.clone();
    let mut unfilled = Vec::new();
    for i in 0..original.len() {
        if original[i].is_some() {
            continue;
        }
        let mut sum = 0.0;
        let mut count = 0usize;
        for k in 1..=3usize {
            let offset = k * spd;
            if i >= offset {
                if let Some(v) = original[i - offset] {
                    sum += v;
                    count += 1;
                }
            }
            if i + offset < original.len() {
                if let Some(v) = original[i + offset] {
                    sum += v;
                    count += 1;
                }
            }
        }
        if count > 0 {
            filled.values[i] = Some(sum / count as f64);
        } else {
            unfilled.push(raw.timestamp(i));
        }
    }
    Ok(GapFillResult {
        series: filled,
        unfilled,
    })
}

/// One day of an aggregated series. `partial` marks days where some hours
/// had no usable readings.
#[derive(Debug, Clone, PartialEq)]
pub struct DayValue {
    pub date: NaiveDate,
    pub value: Option<f64>,
    pub partial: bool,
}

/// Daily means per variable per greenhouse.
#[derive(Debug, Clone)]
pub struct DailySeries {
    pub greenhouse: String,
    pub variable: String,
    pub days: Vec<DayValue>,
}

/// Two-stage aggregation: sub-hourly readings to hourly means over the
/// observed values, then hourly means to a daily mean. A day with no
/// usable hour is missing; a day with fewer than 24 usable hours is
/// flagged partial. Series already at daily cadence pass through.
pub fn aggregate_daily(raw: &RawSeries) -> Result<DailySeries> {
    if raw.values.is_empty() {
        return Err(Error::Pipeline(format!(
            "series {}/{} is empty",
            raw.greenhouse, raw.variable
        )));
    }
    if raw.cadence_seconds == 86_400 {
        let days = (0..raw.values.len())
            .map(|i| DayValue {
                date: raw.timestamp(i).date(),
                value: raw.values[i],
                partial: false,
            })
            .collect();
        return Ok(DailySeries {
            greenhouse: raw.greenhouse.clone(),
            variable: raw.variable.clone(),
            days,
        });
    }
    if 3_600 % raw.cadence_seconds != 0 {
        return Err(Error::Pipeline(format!(
            "series {}/{}: cadence {}s does not divide one hour",
            raw.greenhouse, raw.variable, raw.cadence_seconds
        )));
    }

    // (date, hour) -> running mean of observed readings.
    let mut hourly: Vec<(NaiveDate, u32, f64, usize)> = Vec::new();
    for i in 0..raw.values.len() {
        let ts = raw.timestamp(i);
        let key = (ts.date(), ts.hour());
        match hourly.last_mut() {
            Some((d, h, sum, n)) if (*d, *h) == key => {
                if let Some(v) = raw.values[i] {
                    *sum += v;
                    *n += 1;
                }
            }
            _ => {
                let (sum, n) = match raw.values[i] {
                    Some(v) => (v, 1),
                    None => (0.0, 0),
                };
                hourly.push((key.0, key.1, sum, n));
            }
        }
    }

    let mut days: Vec<DayValue> = Vec::new();
    let mut current: Option<(NaiveDate, f64, usize, usize)> = None; // date, sum, hours_present, hours_total
    let flush = |c: Option<(NaiveDate, f64, usize, usize)>, days: &mut Vec<DayValue>| {
        if let Some((date, sum, present, _total)) = c {
            days.push(DayValue {
                date,
                value: if present > 0 {
                    Some(sum / present as f64)
                } else {
                    None
                },
                partial: present < 24,
            });
        }
    };
    for (date, _hour, sum, n) in hourly {
        let hour_mean = if n > 0 { Some(sum / n as f64) } else { None };
        match &mut current {
            Some((d, day_sum, present, total)) if *d == date => {
                *total += 1;
                if let Some(m) = hour_mean {
                    *day_sum += m;
                    *present += 1;
                }
            }
            _ => {
                flush(current.take(), &mut days);
                current = Some((
                    date,
                    hour_mean.unwrap_or(0.0),
                    usize::from(hour_mean.is_some()),
                    1,
                ));
            }
        }
    }
    flush(current, &mut days);

    Ok(DailySeries {
        greenhouse: raw.greenhouse.clone(),
        variable: raw.variable.clone(),
        days,
    })
}

/// One line-day of the analysis table.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyRecord {
    pub greenhouse: String,
    pub line: String,
    pub day: i64,
    pub yield_kg: Option<f64>,
    pub co2_ppm: Option<f64>,
    pub rh_percent: Option<f64>,
    pub par_umol: Option<f64>,
    pub temp_c: Option<f64>,
    pub water_l_m2: Option<f64>,
    /// Discrete yield state 1..3, present after discretization.
    pub state: Option<usize>,
}

impl DailyRecord {
    pub fn empty(greenhouse: &str, line: &str, day: i64) -> Self {
        Self {
            greenhouse: greenhouse.to_string(),
            line: line.to_string(),
            day,
            yield_kg: None,
            co2_ppm: None,
            rh_percent: None,
            par_umol: None,
            temp_c: None,
            water_l_m2: None,
            state: None,
        }
    }

    /// Climate value by short variable key.
    pub fn value(&self, variable: &str) -> Option<f64> {
        match variable {
            "co2" => self.co2_ppm,
            "rh" => self.rh_percent,
            "par" => self.par_umol,
            "temp" => self.temp_c,
            "water" => self.water_l_m2,
            _ => None,
        }
    }

    pub fn set_value(&mut self, variable: &str, value: Option<f64>) -> Result<()> {
        let slot = match variable {
            "co2" => &mut self.co2_ppm,
            "rh" => &mut self.rh_percent,
            "par" => &mut self.par_umol,
            "temp" => &mut self.temp_c,
            "water" => &mut self.water_l_m2,
            other => {
                return Err(Error::Pipeline(format!("unknown climate variable `{other}`")))
            }
        };
        *slot = value;
        Ok(())
    }
}

/// Centers and scales each variable to zero mean and unit sample standard
/// deviation (n-1 denominator) within each greenhouse, over the rows where
/// the variable is observed.
pub fn zscore_within_group(records: &mut [DailyRecord], variables: &[&str]) -> Result<()> {
    let mut groups: Vec<String> = records.iter().map(|r| r.greenhouse.clone()).collect();
    groups.sort();
    groups.dedup();
    for group in &groups {
        for &var in variables {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| &r.greenhouse == group)
                .filter_map(|r| r.value(var))
                .collect();
            if values.len() < 2 {
                return Err(Error::ZeroVariance {
                    group: group.clone(),
                    variable: var.to_string(),
                });
            }
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            let sd = (ss / (n - 1.0)).sqrt();
            if sd == 0.0 {
                return Err(Error::ZeroVariance {
                    group: group.clone(),
                    variable: var.to_string(),
                });
            }
            for r in records.iter_mut().filter(|r| &r.greenhouse == group) {
                if let Some(v) = r.value(var) {
                    r.set_value(var, Some((v - mean) / sd))?;
                }
            }
        }
    }
    Ok(())
}

/// Tertile thresholds in kg; the middle state is the closed interval
/// `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPoints {
    pub lower: f64,
    pub upper: f64,
}

impl CutPoints {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower < upper) {
            return Err(Error::DegenerateCutPoints);
        }
        Ok(Self { lower, upper })
    }
}

/// Empirical 1/3 and 2/3 quantiles by linear interpolation between order
/// statistics (quantile position `h = (n-1)p + 1`).
pub fn tertile_cutpoints(values: &[f64]) -> Result<CutPoints> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateCutPoints);
    }
    let q = |p: f64| -> f64 {
        let h = (sorted.len() as f64 - 1.0) * p;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        if lo + 1 < sorted.len() {
            sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
        } else {
            sorted[lo]
        }
    };
    CutPoints::new(q(1.0 / 3.0), q(2.0 / 3.0))
}

/// Discretizes yields: below `lower` is state 1, the closed interval
/// `[lower, upper]` is state 2, above `upper` is state 3. Ties at the
/// cut-points land in state 2.
pub fn assign_states(yields: &[f64], cuts: &CutPoints) -> Result<Vec<usize>> {
    yields
        .iter()
        .map(|&y| {
            if y < 0.0 {
                Err(Error::NegativeYield(y))
            } else if y < cuts.lower {
                Ok(1)
            } else if y <= cuts.upper {
                Ok(2)
            } else {
                Ok(3)
            }
        })
        .collect()
}

/// Forward-carries sparse (day, value) measurements to a dense daily
/// vector: each day takes the most recent value at or before it; days
/// before the first measurement stay missing.
pub fn forward_carry(weekly: &[(i64, f64)], horizon_days: usize) -> Result<Vec<Option<f64>>> {
    if weekly.is_empty() {
        return Err(Error::Pipeline("forward_carry: no measurements".into()));
    }
    for w in weekly.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Pipeline(format!(
                "forward_carry: days not strictly increasing at {}",
                w[1].0
            )));
        }
    }
    let mut out = vec![None; horizon_days];
    let mut idx = 0usize;
    let mut current: Option<f64> = None;
    for (day, slot) in out.iter_mut().enumerate() {
        let day = day as i64;
        while idx < weekly.len() && weekly[idx].0 <= day {
            current = Some(weekly[idx].1);
            idx += 1;
        }
        *slot = current;
    }
    Ok(out)
}

/// Pairwise Pearson correlations of detrended anomalies.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub variables: Vec<String>,
    pub matrix: DMatrix<f64>,
}

/// Detrends each variable within each (greenhouse, line) series by
/// subtracting a centered moving average of width `window` (odd, >= 3),
/// then correlates the pooled residuals across variable pairs. Residuals
/// exist only where the full window is observed.
pub fn detrended_correlations(
    records: &[DailyRecord],
    variables: &[&str],
    window: usize,
) -> Result<CorrelationMatrix> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::Pipeline(format!(
            "detrend window must be odd and at least 3, got {window}"
        )));
    }
    let mut keys: Vec<(String, String)> = records
        .iter()
        .map(|r| (r.greenhouse.clone(), r.line.clone()))
        .collect();
    keys.sort();
    keys.dedup();

    // residuals[v] collects every group's detrended values, aligned so
    // that positions match across variables within a group.
    let mut residuals: Vec<Vec<Option<f64>>> = vec![Vec::new(); variables.len()];
    let half = window / 2;
    for key in &keys {
        let mut rows: Vec<&DailyRecord> = records
            .iter()
            .filter(|r| r.greenhouse == key.0 && r.line == key.1)
            .collect();
        rows.sort_by_key(|r| r.day);
        if rows.len() <= window {
            return Err(Error::Pipeline(format!(
                "series {}/{} has {} days; need more than the window {window}",
                key.0,
                key.1,
                rows.len()
            )));
        }
        for (vi, &var) in variables.iter().enumerate() {
            let series: Vec<Option<f64>> = rows.iter().map(|r| r.value(var)).collect();
            for i in 0..series.len() {
                let res = if i >= half && i + half < series.len() {
                    let win = &series[i - half..=i + half];
                    if win.iter().all(|v| v.is_some()) && series[i].is_some() {
                        let mean =
                            win.iter().map(|v| v.unwrap()).sum::<f64>() / window as f64;
                        Some(series[i].unwrap() - mean)
                    } else {
                        None
                    }
                } else {
                    None
                };
                residuals[vi].push(res);
            }
        }
    }

    let m = variables.len();
    let mut matrix = DMatrix::identity(m, m);
    for a in 0..m {
        for b in (a + 1)..m {
            let pairs: Vec<(f64, f64)> = residuals[a]
                .iter()
                .zip(&residuals[b])
                .filter_map(|(x, y)| x.zip(*y))
                .collect();
            if pairs.len() < 3 {
                return Err(Error::Pipeline(format!(
                    "fewer than 3 paired residuals for {} vs {}",
                    variables[a], variables[b]
                )));
            }
            let r = pearson(&pairs)?;
            matrix[(a, b)] = r;
            matrix[(b, a)] = r;
        }
    }
    Ok(CorrelationMatrix {
        variables: variables.iter().map(|s| s.to_string()).collect(),
        matrix,
    })
}

fn pearson(pairs: &[(f64, f64)]) -> Result<f64> {
    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in pairs {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
        syy += (y - mean_y) * (y - mean_y);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Pipeline(
            "correlation undefined: a residual series is constant".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn dt(date: &str, h: u32, m: u32) -> NaiveDateTime {
        NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .unwrap()
            .and_hms_opt(h, m, 0)
            .unwrap()
    }

    /// Dense 15-minute grid across `days` days with values from `f`;
    /// `None` marks missing.
    fn grid(days: usize, f: impl Fn(usize) -> Option<f64>) -> Vec<(NaiveDateTime, Option<f64>)> {
        let start = dt("2024-10-10", 0, 0);
        (0..days * 96)
            .map(|i| {
                (
                    start + chrono::Duration::minutes(15 * i as i64),
                    f(i),
                )
            })
            .collect()
    }

    #[test]
    fn constant_series_aggregates_to_its_value() {
        let raw = RawSeries::from_points("GH-3", "co2", &grid(2, |_| Some(400.0))).unwrap();
        let daily = aggregate_daily(&raw).unwrap();
        assert_eq!(daily.days.len(), 2);
        assert_eq!(daily.days[0].value, Some(400.0));
        assert!(!daily.days[0].partial);
    }

    #[test]
    fn hourly_means_one_to_twentyfour_average_to_twelve_and_a_half() {
        // Four slots per hour all equal to the hour number (1-based).
        let raw = RawSeries::from_points(
            "GH-3",
            "rh",
            &grid(1, |i| Some((i / 4 + 1) as f64)),
        )
        .unwrap();
        let daily = aggregate_daily(&raw).unwrap();
        assert_eq!(daily.days[0].value, Some(12.5));
    }

    #[test]
    fn half_missing_day_uses_present_hours_and_is_flagged() {
        // Hours 0..12 observed at value 10, hours 12..24 missing entirely.
        let raw = RawSeries::from_points(
            "GH-3",
            "par",
            &grid(1, |i| if i < 48 { Some(10.0) } else { None }),
        )
        .unwrap();
        let daily = aggregate_daily(&raw).unwrap();
        assert_eq!(daily.days[0].value, Some(10.0));
        assert!(daily.days[0].partial);
    }

    #[test]
    fn empty_day_is_missing() {
        let raw = RawSeries::from_points(
            "GH-3",
            "par",
            &grid(3, |i| if (96..192).contains(&i) { None } else { Some(1.0) }),
        )
        .unwrap();
        let daily = aggregate_daily(&raw).unwrap();
        assert_eq!(daily.days[1].value, None);
        assert_eq!(daily.days[0].value, Some(1.0));
    }

    #[test]
    fn gap_fill_takes_the_neighbourhood_mean() {
        // Slot 10:00 missing on day 3; the same slot on days 0,1,2,4,5,6
        // holds 1..6.
        let target = 3 * 96 + 40;
        let neighbour_values = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let raw = RawSeries::from_points(
            "GH-3",
            "co2",
            &grid(7, |i| {
                if i == target {
                    None
                } else if i % 96 == 40 {
                    Some(neighbour_values[i / 96 - usize::from(i / 96 > 3)])
                } else {
                    Some(0.0)
                }
            }),
        )
        .unwrap();
        let filled = gap_fill_neighborhood(&raw).unwrap();
        assert!(filled.unfilled.is_empty());
        assert_eq!(filled.series.values()[target], Some(3.5));
    }

    #[test]
    fn gap_fill_uses_available_neighbours_only() {
        // Only the +-1 day neighbours observed: (10 + 14) / 2 = 12.
        let target = 3 * 96 + 8;
        let raw = RawSeries::from_points(
            "GH-3",
            "co2",
            &grid(7, |i| {
                let day = i / 96;
                match i % 96 {
                    8 => {
                        if i == target - 96 {
                            Some(10.0)
                        } else if i == target + 96 {
                            Some(14.0)
                        } else {
                            None
                        }
                    }
                    // Slot 90 is missing on days 0..=3, so day 0 has no
                    // observed neighbour at all.
                    90 => (day > 3).then_some(1.0),
                    _ => Some(0.0),
                }
            }),
        )
        .unwrap();
        let filled = gap_fill_neighborhood(&raw).unwrap();
        assert_eq!(filled.series.values()[target], Some(12.0));
        // Slots whose entire neighbourhood is missing are reported.
        assert_eq!(filled.unfilled, vec![raw.timestamp(90)]);
    }

    #[test]
    fn gap_fill_never_alters_observed_values() {
        let raw = RawSeries::from_points(
            "GH-2",
            "rh",
            &grid(8, |i| {
                if i % 17 == 0 {
                    None
                } else {
                    Some((i as f64) * 0.1 + 7.0)
                }
            }),
        )
        .unwrap();
        let filled = gap_fill_neighborhood(&raw).unwrap();
        for (orig, new) in raw.values().iter().zip(filled.series.values()) {
            if let Some(v) = orig {
                assert_eq!(new.unwrap().to_bits(), v.to_bits());
            }
        }
        // A gap-free series passes through bitwise unchanged.
        let dense = RawSeries::from_points("GH-2", "rh", &grid(8, |i| Some(i as f64))).unwrap();
        let out = gap_fill_neighborhood(&dense).unwrap();
        assert_eq!(out.series, dense);
        assert!(out.unfilled.is_empty());
    }

    #[test]
    fn zscore_standardizes_within_each_group() {
        let mut records: Vec<DailyRecord> = (0..3)
            .map(|d| {
                let mut r = DailyRecord::empty("GH-3", "*", d);
                r.co2_ppm = Some(d as f64);
                r
            })
            .collect();
        zscore_within_group(&mut records, &["co2"]).unwrap();
        let z: Vec<f64> = records.iter().map(|r| r.co2_ppm.unwrap()).collect();
        assert_eq!(z, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn zscore_is_invariant_to_positive_affine_maps() {
        let values = [412.0, 430.5, 399.2, 405.8, 460.1, 447.3];
        let build = |a: f64, b: f64| -> Vec<DailyRecord> {
            values
                .iter()
                .enumerate()
                .map(|(d, v)| {
                    let mut r = DailyRecord::empty("GH-4", "*", d as i64);
                    r.rh_percent = Some(a * v + b);
                    r
                })
                .collect()
        };
        let mut plain = build(1.0, 0.0);
        let mut scaled = build(3.7, -120.0);
        zscore_within_group(&mut plain, &["rh"]).unwrap();
        zscore_within_group(&mut scaled, &["rh"]).unwrap();
        for (p, s) in plain.iter().zip(&scaled) {
            assert!((p.rh_percent.unwrap() - s.rh_percent.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn zscore_rejects_constant_groups_by_name() {
        let mut records: Vec<DailyRecord> = (0..4)
            .map(|d| {
                let mut r = DailyRecord::empty("GH-5", "*", d);
                r.par_umol = Some(250.0);
                r
            })
            .collect();
        match zscore_within_group(&mut records, &["par"]) {
            Err(Error::ZeroVariance { group, variable }) => {
                assert_eq!(group, "GH-5");
                assert_eq!(variable, "par");
            }
            other => panic!("expected zero-variance error, got {other:?}"),
        }
    }

    #[test]
    fn tertiles_of_one_through_nine() {
        let cuts = tertile_cutpoints(&[9.0, 1.0, 3.0, 7.0, 5.0, 2.0, 8.0, 4.0, 6.0]).unwrap();
        assert!((cuts.lower - 3.6666666666666665).abs() < 1e-12);
        assert!((cuts.upper - 6.333333333333333).abs() < 1e-12);
        assert!(matches!(
            tertile_cutpoints(&[2.0, 2.0, 2.0, 2.0]),
            Err(Error::DegenerateCutPoints)
        ));
    }

    #[test]
    fn state_assignment_uses_the_paper_thresholds() {
        let cuts = CutPoints::new(0.55, 1.15).unwrap();
        let states = assign_states(&[0.50, 0.80, 1.20, 0.55, 1.15], &cuts).unwrap();
        assert_eq!(states, vec![1, 2, 3, 2, 2]);
        assert_eq!(assign_states(&[], &cuts).unwrap(), Vec::<usize>::new());
        assert!(matches!(
            assign_states(&[-0.1], &cuts),
            Err(Error::NegativeYield(_))
        ));
    }

    #[test]
    fn forward_carry_propagates_the_latest_value() {
        let daily = forward_carry(&[(0, 1.0), (7, 2.0)], 10).unwrap();
        for d in 0..7 {
            assert_eq!(daily[d], Some(1.0));
        }
        for d in 7..10 {
            assert_eq!(daily[d], Some(2.0));
        }
        assert_eq!(
            forward_carry(&[(0, 5.0)], 3).unwrap(),
            vec![Some(5.0); 3]
        );
        let late = forward_carry(&[(3, 2.5)], 5).unwrap();
        assert_eq!(late, vec![None, None, None, Some(2.5), Some(2.5)]);
        assert!(forward_carry(&[], 5).is_err());
    }

    fn correlation_fixture(noise: f64, seed: u64) -> Vec<DailyRecord> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..500)
            .map(|d| {
                let trend = (d as f64 / 40.0).sin() * 50.0 + d as f64 * 0.05;
                let mut r = DailyRecord::empty("GH-3", "1", d);
                r.co2_ppm = Some(trend + noise * (rng.random::<f64>() - 0.5));
                r.rh_percent = Some(trend + noise * (rng.random::<f64>() - 0.5));
                r
            })
            .collect()
    }

    #[test]
    fn identical_series_correlate_perfectly() {
        let mut records = correlation_fixture(2.0, 11);
        for r in &mut records {
            r.rh_percent = r.co2_ppm;
        }
        let c = detrended_correlations(&records, &["co2", "rh"], 7).unwrap();
        assert!((c.matrix[(0, 1)] - 1.0).abs() < 1e-12);
        assert_eq!(c.matrix[(0, 0)], 1.0);
        assert_eq!(c.matrix[(1, 1)], 1.0);
        assert_eq!(c.matrix[(0, 1)], c.matrix[(1, 0)]);
    }

    #[test]
    fn detrending_removes_a_shared_trend() {
        // Strong common trend, independent noise: raw correlation is high
        // but residual correlation is weak.
        let records = correlation_fixture(2.0, 23);
        let c = detrended_correlations(&records, &["co2", "rh"], 7).unwrap();
        assert!(
            c.matrix[(0, 1)].abs() < 0.2,
            "residual correlation {}",
            c.matrix[(0, 1)]
        );
        let raw: Vec<(f64, f64)> = records
            .iter()
            .map(|r| (r.co2_ppm.unwrap(), r.rh_percent.unwrap()))
            .collect();
        assert!(pearson(&raw).unwrap() > 0.9);
    }

    #[test]
    fn window_validation() {
        let records = correlation_fixture(1.0, 3);
        assert!(detrended_correlations(&records, &["co2", "rh"], 4).is_err());
        assert!(detrended_correlations(&records, &["co2", "rh"], 1).is_err());
        let short: Vec<DailyRecord> = records.into_iter().take(5).collect();
        assert!(detrended_correlations(&short, &["co2", "rh"], 7).is_err());
    }
}
