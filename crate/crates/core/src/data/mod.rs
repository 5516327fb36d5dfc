//! Exogenous scenarios: file ingestion, synthetic generation, train/test
//! splitting and observation scaling.

mod generator;
mod observation;
mod scenario;

pub use generator::{generate_synthetic, DiurnalProfile, GeneratorConfig, NoiseScales};
pub use observation::{
    cyclic, normalize_observation, scale, unscale, ObsStats, OBS_DIM, OBS_FIELDS,
};
pub use scenario::{load_scenarios, read_scenarios, ColumnSchema, ScenarioSet, SCENARIO_COLUMNS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}` and no default declared")]
    MissingColumn(String),
    #[error("line {line}, column `{column}`: cannot parse `{value}`")]
    NonNumeric {
        line: usize,
        column: String,
        value: String,
    },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("day {day} has {got} records, expected {expected}")]
    DayLength {
        day: usize,
        got: usize,
        expected: usize,
    },
    #[error("day {day}, position {position}: hour {hour} out of order")]
    HourOrder { day: usize, position: usize, hour: u32 },
    #[error("cannot split {total} days with n_train = {n_train}")]
    Split { n_train: usize, total: usize },
    #[error("generator: {0}")]
    Generator(String),
}

/// First `n_train` days for training, the rest for testing.
pub fn split(set: &ScenarioSet, n_train: usize) -> Result<(ScenarioSet, ScenarioSet), DataError> {
    if n_train == 0 || n_train >= set.len() {
        return Err(DataError::Split {
            n_train,
            total: set.len(),
        });
    }
    let part = |days: &[Vec<crate::env::ExogenousRecord>], tag: &str| ScenarioSet {
        name: set.name.clone(),
        seed: set.seed,
        split: Some(tag.to_string()),
        days: days.to_vec(),
    };
    Ok((
        part(&set.days[..n_train], "train"),
        part(&set.days[n_train..], "test"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_counts() {
        let set = generate_synthetic(&GeneratorConfig::default(), 30).unwrap();
        let (tr, te) = split(&set, 20).unwrap();
        assert_eq!((tr.len(), te.len()), (20, 10));
        let two = generate_synthetic(&GeneratorConfig::default(), 2).unwrap();
        let (tr, te) = split(&two, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (1, 1));
        assert!(matches!(split(&two, 2), Err(DataError::Split { .. })));
    }

    #[test]
    fn split_is_ordered_partition() {
        let set = generate_synthetic(&GeneratorConfig::default(), 9).unwrap();
        let (tr, te) = split(&set, 4).unwrap();
        let joined: Vec<_> = tr.days.iter().chain(&te.days).cloned().collect();
        assert_eq!(joined, set.days);
    }

    #[test]
    fn write_then_load_round_trips() {
        let set = generate_synthetic(&GeneratorConfig::default(), 4).unwrap();
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let back = read_scenarios(buf.as_slice(), &ColumnSchema::default(), 24, "x").unwrap();
        assert_eq!(back.days, set.days);
    }
}
