//! CSV readers for the raw input streams.
//!
//! Sensor schema: `timestamp,greenhouse,variable,value` with ISO-8601
//! timestamps and a blank value meaning missing. Harvest schema:
//! `greenhouse,line,day,yield_kg` with integer day indices.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::NaiveDateTime;

use crate::error::{Error, Result};

use super::{RawSeries, CLIMATE_VARIABLES};

/// One weekly harvest measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct HarvestRecord {
    pub greenhouse: String,
    pub line: String,
    pub day: i64,
    pub yield_kg: f64,
}

fn parse_timestamp(s: &str) -> Result<NaiveDateTime> {
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(ts) = NaiveDateTime::parse_from_str(s.trim(), fmt) {
            return Ok(ts);
        }
    }
    Err(Error::Pipeline(format!("cannot parse timestamp `{s}`")))
}

/// Reads the 15-minute sensor log into one [`RawSeries`] per
/// (greenhouse, variable). Rows may arrive in any order; duplicate
/// timestamps within a series are rejected.
pub fn read_sensor_csv<R: Read>(reader: R) -> Result<Vec<RawSeries>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expect = ["timestamp", "greenhouse", "variable", "value"];
    if headers.iter().collect::<Vec<_>>() != expect {
        return Err(Error::Pipeline(format!(
            "sensor csv header must be {}, got {}",
            expect.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut groups: BTreeMap<(String, String), Vec<(NaiveDateTime, Option<f64>)>> =
        BTreeMap::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let ts = parse_timestamp(&row[0])
            .map_err(|e| Error::Pipeline(format!("sensor row {}: {e}", line + 2)))?;
        let variable = row[2].trim().to_string();
        if !CLIMATE_VARIABLES.contains(&variable.as_str()) {
            return Err(Error::Pipeline(format!(
                "sensor row {}: unknown variable `{variable}` (expected one of {})",
                line + 2,
                CLIMATE_VARIABLES.join(", ")
            )));
        }
        let value = match row[3].trim() {
            "" => None,
            v => Some(v.parse::<f64>().map_err(|_| {
                Error::Pipeline(format!("sensor row {}: bad value `{v}`", line + 2))
            })?),
        };
        groups
            .entry((row[1].trim().to_string(), variable))
            .or_default()
            .push((ts, value));
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((greenhouse, variable), mut points) in groups {
        points.sort_by_key(|(ts, _)| *ts);
        for w in points.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Pipeline(format!(
                    "series {greenhouse}/{variable}: duplicate timestamp {}",
                    w[0].0
                )));
            }
        }
        out.push(RawSeries::from_points(&greenhouse, &variable, &points)?);
    }
    Ok(out)
}

/// Reads weekly harvest weights. Yields must be non-negative and days
/// non-negative integers.
pub fn read_harvest_csv<R: Read>(reader: R) -> Result<Vec<HarvestRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expect = ["greenhouse", "line", "day", "yield_kg"];
    if headers.iter().collect::<Vec<_>>() != expect {
        return Err(Error::Pipeline(format!(
            "harvest csv header must be {}, got {}",
            expect.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let day: i64 = row[2].trim().parse().map_err(|_| {
            Error::Pipeline(format!("harvest row {}: bad day `{}`", line + 2, &row[2]))
        })?;
        if day < 0 {
            return Err(Error::Pipeline(format!(
                "harvest row {}: negative day {day}",
                line + 2
            )));
        }
        let yield_kg: f64 = row[3].trim().parse().map_err(|_| {
            Error::Pipeline(format!(
                "harvest row {}: bad yield `{}`",
                line + 2,
                &row[3]
            ))
        })?;
        if !(yield_kg >= 0.0) {
            return Err(Error::Pipeline(format!(
                "harvest row {}: negative yield {yield_kg}",
                line + 2
            )));
        }
        out.push(HarvestRecord {
            greenhouse: row[0].trim().to_string(),
            line: row[1].trim().to_string(),
            day,
            yield_kg,
        });
    }
    Ok(out)
}
