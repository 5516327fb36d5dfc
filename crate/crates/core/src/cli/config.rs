use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::RngCore;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use super::CliError;
use crate::analysis::AnalysisConfig;
use crate::baseline::CemConfig;
use crate::data::{ColumnSchema, GeneratorConfig};
use crate::env::EnvConfig;
use crate::rl::{substream, Algo, TrainConfig};

/// Where the scenario days come from and how they split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataConfig {
    /// Scenario CSV; synthetic days are generated when absent.
    pub scenario: Option<PathBuf>,
    pub synthetic_days: usize,
    /// Leading days used for training; the rest form the test split.
    pub n_train: usize,
    pub generator: GeneratorConfig,
    pub schema: ColumnSchema,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            synthetic_days: 30,
            n_train: 20,
            generator: GeneratorConfig::default(),
            schema: ColumnSchema::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Zero,
    Random,
    Checkpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    All,
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub policy: PolicyKind,
    pub checkpoint: Option<PathBuf>,
    pub split: SplitKind,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            policy: PolicyKind::Zero,
            checkpoint: None,
            split: SplitKind::All,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvaluateConfig {
    pub checkpoints: Vec<PathBuf>,
    /// `"cem"`, or a CSV with a `cost` column holding one reference cost
    /// per test day.
    pub reference: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeConfig {
    pub checkpoint: Option<PathBuf>,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Root seed; every random stream of the run derives from it.
    pub seed: u64,
    pub out: PathBuf,
    pub algo: Algo,
    pub env: EnvConfig,
    pub data: DataConfig,
    pub train: TrainConfig,
    pub cem: CemConfig,
    pub analysis: AnalysisConfig,
    pub simulate: SimulateConfig,
    pub evaluate: EvaluateConfig,
    pub analyze: AnalyzeConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: PathBuf::from("out"),
            algo: Algo::SrTd3,
            env: EnvConfig::default(),
            data: DataConfig::default(),
            train: TrainConfig::default(),
            cem: CemConfig::default(),
            analysis: AnalysisConfig::default(),
            simulate: SimulateConfig::default(),
            evaluate: EvaluateConfig {
                checkpoints: Vec::new(),
                reference: "cem".into(),
            },
            analyze: AnalyzeConfig::default(),
        }
    }
}

/// Nested seed fields filled from the root seed rather than from the file.
const DERIVED_SEEDS: [(&str, &str); 3] = [
    ("data.generator.seed", "env"),
    ("train.seed", "train"),
    ("cem.seed", "cem"),
];

/// Origin of a resolved value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    File,
    Flag,
    Seed,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Default => "default",
            Source::File => "file",
            Source::Flag => "flag",
            Source::Seed => "seed",
        })
    }
}

/// A resolved configuration with the origin of every leaf value.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub config: RunConfig,
    pub provenance: BTreeMap<String, (String, Source)>,
}

/// Seed of the named stream `name` under the root seed.
pub fn derive_seed(root: u64, name: &str) -> u64 {
    substream(root, name).next_u64()
}

fn leaves(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
    match v {
        Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                leaves(&key, v, out);
            }
        }
        Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

fn remove_path(t: &mut Table, path: &str) -> Option<Value> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop()?;
    let mut cur = t;
    for p in parts {
        cur = cur.get_mut(p)?.as_table_mut()?;
    }
    cur.remove(last)
}

fn set_path(t: &mut Table, path: &str, value: Value) {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().expect("non-empty path");
    let mut cur = t;
    for p in parts {
        cur = cur
            .entry(p)
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .expect("path through tables");
    }
    cur.insert(last.to_string(), value);
}

/// Overlay `over` onto `base`, merging tables key by key.
fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// The config as a TOML tree without the derived seeds, which may exceed
/// the TOML integer range.
fn to_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut c = cfg.clone();
    c.data.generator.seed = 0;
    c.train.seed = 0;
    c.cem.seed = 0;
    let mut t = match Value::try_from(&c).map_err(|e| CliError::Config(e.to_string()))? {
        Value::Table(t) => t,
        _ => unreachable!("a struct serializes to a table"),
    };
    for (path, _) in DERIVED_SEEDS {
        remove_path(&mut t, path);
    }
    Ok(t)
}

fn derived_seed_values(cfg: &RunConfig) -> [(&'static str, u64); 3] {
    [
        ("data.generator.seed", cfg.data.generator.seed),
        ("train.seed", cfg.train.seed),
        ("cem.seed", cfg.cem.seed),
    ]
}

/// Merge defaults, the optional config file and flag overrides (in that
/// order of precedence, flags last) into a validated [`RunConfig`].
pub fn resolve(
    file: Option<&Path>,
    overrides: &[(&str, Value)],
) -> Result<Resolved, CliError> {
    let mut tree = to_table(&RunConfig::default())?;
    let mut default_leaves = BTreeMap::new();
    leaves("", &Value::Table(tree.clone()), &mut default_leaves);

    let mut file_leaves = BTreeMap::new();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let table: Table = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        leaves("", &Value::Table(table.clone()), &mut file_leaves);
        for (p, _) in DERIVED_SEEDS {
            if file_leaves.contains_key(p) {
                return Err(CliError::Config(format!(
                    "{p} derives from the root seed; set `seed` instead"
                )));
            }
        }
        merge(&mut tree, table);
    }
    let mut flag_keys = Vec::new();
    for (path, v) in overrides {
        set_path(&mut tree, path, v.clone());
        flag_keys.push(path.to_string());
    }

    let mut config: RunConfig = Value::Table(tree)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    for (path, stream) in DERIVED_SEEDS {
        let s = derive_seed(config.seed, stream);
        match path {
            "data.generator.seed" => config.data.generator.seed = s,
            "train.seed" => config.train.seed = s,
            _ => config.cem.seed = s,
        }
    }
    validate(&config)?;

    let mut resolved = BTreeMap::new();
    leaves("", &Value::Table(to_table(&config)?), &mut resolved);
    for key in file_leaves.keys() {
        let known = resolved.contains_key(key)
            || resolved.keys().any(|k| k.starts_with(&format!("{key}.")));
        if !known {
            return Err(CliError::Config(format!("unknown config key `{key}`")));
        }
    }
    let mut provenance: BTreeMap<String, (String, Source)> = resolved
        .into_iter()
        .map(|(k, v)| {
            let src = if flag_keys.contains(&k) {
                Source::Flag
            } else if file_leaves.contains_key(&k) {
                Source::File
            } else if default_leaves.contains_key(&k) {
                Source::Default
            } else {
                Source::File
            };
            (k, (v, src))
        })
        .collect();
    for (k, v) in derived_seed_values(&config) {
        provenance.insert(k.to_string(), (v.to_string(), Source::Seed));
    }
    Ok(Resolved { config, provenance })
}

fn validate(c: &RunConfig) -> Result<(), CliError> {
    c.env.validate().map_err(CliError::Config)?;
    c.train.validate().map_err(CliError::Config)?;
    c.cem.validate().map_err(|e| CliError::Config(e.to_string()))?;
    if c.train.episodes == 0 {
        return Err(CliError::Config("train.episodes must be positive".into()));
    }
    if c.analysis.k_min < 1 || c.analysis.k_min > c.analysis.k_max {
        return Err(CliError::Config("analysis needs 1 <= k_min <= k_max".into()));
    }
    if c.analysis.n_components == 0 {
        return Err(CliError::Config("analysis.n_components must be positive".into()));
    }
    if c.data.scenario.is_none() && c.data.synthetic_days == 0 {
        return Err(CliError::Config("data.synthetic_days must be positive".into()));
    }
    Ok(())
}

impl Resolved {
    /// Write `config.toml` (reloadable: derived seeds are left out) and
    /// `provenance.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let tree = to_table(&self.config)?;
        let text = toml::to_string(&tree).map_err(|e| CliError::Config(e.to_string()))?;
        std::fs::write(dir.join("config.toml"), text)?;
        let mut w = csv::Writer::from_path(dir.join("provenance.csv"))?;
        w.write_record(["key", "value", "source"])?;
        for (k, (v, s)) in &self.provenance {
            w.write_record([k.as_str(), v.as_str(), &s.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let r = resolve(None, &[]).unwrap();
        assert_eq!(r.config.train.episodes, 2500);
        assert_eq!(r.provenance["train.episodes"].1, Source::Default);
        assert_eq!(r.provenance["train.seed"].1, Source::Seed);
        assert_eq!(r.config.cem.seed, derive_seed(0, "cem"));
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "seed = 5\n[train]\nepisodes = 10\nbatch_size = 32\n").unwrap();
        let r = resolve(Some(&path), &[("train.episodes", Value::Integer(3))]).unwrap();
        assert_eq!(r.config.seed, 5);
        assert_eq!(r.config.train.episodes, 3);
        assert_eq!(r.config.train.batch_size, 32);
        assert_eq!(r.provenance["train.episodes"].1, Source::Flag);
        assert_eq!(r.provenance["train.batch_size"].1, Source::File);
        assert_eq!(r.provenance["train.tau"].1, Source::Default);
    }

    #[test]
    fn rejects_unknown_and_seed_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "[train]\nepisodez = 3\n").unwrap();
        assert!(matches!(resolve(Some(&path), &[]), Err(CliError::Config(_))));
        std::fs::write(&path, "[train]\nseed = 3\n").unwrap();
        assert!(matches!(resolve(Some(&path), &[]), Err(CliError::Config(_))));
        std::fs::write(&path, "[train]\nepisodes = 0\n").unwrap();
        assert!(matches!(resolve(Some(&path), &[]), Err(CliError::Config(_))));
    }

    #[test]
    fn written_config_reloads_identically() {
        let dir = tempfile::tempdir().unwrap();
        let r = resolve(None, &[("seed", Value::Integer(9))]).unwrap();
        r.write(dir.path()).unwrap();
        let again = resolve(Some(&dir.path().join("config.toml")), &[]).unwrap();
        assert_eq!(again.config, r.config);
    }
}
