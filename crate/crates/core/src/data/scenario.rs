use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DataError;
use crate::env::ExogenousRecord;

/// Header of scenario files, in column order.
pub const SCENARIO_COLUMNS: [&str; 10] = [
    "day",
    "hour",
    "price_buy",
    "price_sell",
    "price_h2",
    "q_rad",
    "t_amb",
    "demand_e",
    "demand_h",
    "demand_c",
];

/// An ordered list of days, each `horizon` hourly records long.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub name: String,
    pub seed: Option<u64>,
    pub split: Option<String>,
    pub days: Vec<Vec<ExogenousRecord>>,
}

impl ScenarioSet {
    pub fn new(name: impl Into<String>, days: Vec<Vec<ExogenousRecord>>) -> Self {
        Self {
            name: name.into(),
            seed: None,
            split: None,
            days,
        }
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn validate(&self, horizon: usize) -> Result<(), DataError> {
        for (d, day) in self.days.iter().enumerate() {
            if day.len() != horizon {
                return Err(DataError::DayLength {
                    day: d + 1,
                    got: day.len(),
                    expected: horizon,
                });
            }
            for (h, rec) in day.iter().enumerate() {
                if rec.hour as usize != h + 1 {
                    return Err(DataError::HourOrder {
                        day: d + 1,
                        position: h + 1,
                        hour: rec.hour,
                    });
                }
                rec.validate().map_err(|message| DataError::Invalid {
                    line: d * horizon + h + 2,
                    message,
                })?;
            }
        }
        Ok(())
    }

    /// Write as comma-separated text, one row per hour.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), DataError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(SCENARIO_COLUMNS)?;
        for rec in self.days.iter().flatten() {
            wtr.write_record([
                rec.day.to_string(),
                rec.hour.to_string(),
                fmt(rec.price_buy),
                fmt(rec.price_sell),
                fmt(rec.price_h2),
                fmt(rec.q_rad),
                fmt(rec.t_amb),
                fmt(rec.demand_e),
                fmt(rec.demand_h),
                fmt(rec.demand_c),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), DataError> {
        self.write_csv(File::create(path)?)
    }
}

fn fmt(x: f64) -> String {
    // Shortest round-trip representation.
    format!("{x:?}")
}

/// Column mapping for scenario files whose headers differ from
/// [`SCENARIO_COLUMNS`], with fallback values for absent columns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    /// `(canonical name, name in file)` pairs.
    pub renames: Vec<(String, String)>,
    /// `(canonical name, value)` used when a column is missing.
    pub defaults: Vec<(String, f64)>,
}

impl ColumnSchema {
    fn file_name<'a>(&'a self, canonical: &'a str) -> &'a str {
        self.renames
            .iter()
            .find(|(c, _)| c == canonical)
            .map(|(_, f)| f.as_str())
            .unwrap_or(canonical)
    }

    fn default_for(&self, canonical: &str) -> Option<f64> {
        self.defaults
            .iter()
            .find(|(c, _)| c == canonical)
            .map(|(_, v)| *v)
    }
}

/// Parse a scenario file. Consecutive rows sharing a day boundary (hour
/// restarting at 1) form one day.
pub fn read_scenarios<R: Read>(
    r: R,
    schema: &ColumnSchema,
    horizon: usize,
    name: &str,
) -> Result<ScenarioSet, DataError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers()?.clone();

    enum Source {
        Column(usize),
        Fixed(f64),
    }
    let mut sources = Vec::with_capacity(SCENARIO_COLUMNS.len());
    for col in SCENARIO_COLUMNS {
        let file_col = schema.file_name(col);
        match headers.iter().position(|h| h == file_col) {
            Some(i) => sources.push(Source::Column(i)),
            None => match schema.default_for(col) {
                Some(v) => sources.push(Source::Fixed(v)),
                None => return Err(DataError::MissingColumn(col.to_string())),
            },
        }
    }

    let mut days: Vec<Vec<ExogenousRecord>> = Vec::new();
    for (row_idx, row) in rdr.records().enumerate() {
        let row = row?;
        let line = row_idx + 2;
        let mut vals = [0.0f64; 10];
        for (k, src) in sources.iter().enumerate() {
            vals[k] = match src {
                Source::Fixed(v) => *v,
                Source::Column(i) => {
                    let cell = row.get(*i).unwrap_or("");
                    cell.parse::<f64>().map_err(|_| DataError::NonNumeric {
                        line,
                        column: SCENARIO_COLUMNS[k].to_string(),
                        value: cell.to_string(),
                    })?
                }
            };
        }
        let int = |k: usize| -> Result<u32, DataError> {
            let v = vals[k];
            if v.fract() != 0.0 || v < 0.0 {
                return Err(DataError::NonNumeric {
                    line,
                    column: SCENARIO_COLUMNS[k].to_string(),
                    value: v.to_string(),
                });
            }
            Ok(v as u32)
        };
        let rec = ExogenousRecord {
            day: int(0)?,
            hour: int(1)?,
            price_buy: vals[2],
            price_sell: vals[3],
            price_h2: vals[4],
            q_rad: vals[5],
            t_amb: vals[6],
            demand_e: vals[7],
            demand_h: vals[8],
            demand_c: vals[9],
        };
        rec.validate()
            .map_err(|message| DataError::Invalid { line, message })?;
        if rec.hour == 1 || days.is_empty() {
            days.push(Vec::with_capacity(horizon));
        }
        days.last_mut().expect("day opened above").push(rec);
    }

    let set = ScenarioSet::new(name, days);
    set.validate(horizon)?;
    Ok(set)
}

pub fn load_scenarios(
    path: &Path,
    schema: &ColumnSchema,
    horizon: usize,
) -> Result<ScenarioSet, DataError> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    read_scenarios(File::open(path)?, schema, horizon, &name)
}
