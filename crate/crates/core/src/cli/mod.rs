//! The `hmes` command-line front end: `simulate`, `train`, `evaluate` and
//! `analyze`, each writing plain CSV files plus the resolved configuration
//! into its output directory.

mod config;

pub use config::{
    derive_seed, resolve, AnalyzeConfig, DataConfig, EvaluateConfig, PolicyKind, Resolved,
    RunConfig, SimulateConfig, Source, SplitKind,
};

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use toml::Value;

use crate::analysis::{
    analyze_samples, build_report, collect_activations, evaluate_method, AnalysisError,
    MethodEvaluation,
};
use crate::baseline::{cem_optimize, BaselineError};
use crate::data::{generate_synthetic, load_scenarios, split, DataError, ScenarioSet};
use crate::env::{write_trace, EnvConfig};
use crate::nn::{load_json, save_json, NnError};
use crate::rl::{
    substream, train, write_log, Agent, Algo, DayEval, IdlePolicy, Policy, RandomPolicy, RlError,
    TrainHooks,
};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const DATA: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Data(_) => exit::DATA,
            CliError::Numerical(_) => exit::NUMERICAL,
            CliError::Io(_) | CliError::Csv(_) => exit::OTHER,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<RlError> for CliError {
    fn from(e: RlError) -> Self {
        match e {
            RlError::Config(m) => CliError::Config(m),
            RlError::Env(e) => CliError::Data(e.to_string()),
            RlError::Nn(e) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::Env(e) => CliError::Data(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Rl(e) => e.into(),
            AnalysisError::Io(e) => CliError::Io(e),
            AnalysisError::Csv(e) => CliError::Csv(e),
            AnalysisError::NoDays => CliError::Data(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hmes", version, about = "Hydrogen multi-energy system simulation and learning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Root seed of every random stream.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Scenario CSV (synthetic days are generated otherwise).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Agent variant: ddpg, td3, sr-ddpg or sr-td3.
    #[arg(long, global = true)]
    pub algo: Option<Algo>,
    /// Training episodes.
    #[arg(long, global = true)]
    pub episodes: Option<usize>,
    /// Only report errors.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roll a fixed policy through the scenario days and write step traces.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        policy: Option<PolicyKind>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, value_enum)]
        split: Option<SplitKind>,
    },
    /// Train an agent on the training split.
    Train {
        #[command(flatten)]
        common: Common,
        /// Record wall-clock seconds per episode (makes the log
        /// machine-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Evaluate checkpoints on the test split against a reference cost.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Checkpoint file; repeat for several methods.
        #[arg(long = "checkpoint")]
        checkpoints: Vec<PathBuf>,
        /// `cem`, or a CSV file with a `cost` column.
        #[arg(long)]
        reference: Option<String>,
    },
    /// Principal components and clusters of first-layer actor activations.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

fn path_value(p: &Path) -> Value {
    Value::String(p.to_string_lossy().into_owned())
}

fn common_overrides(c: &Common) -> Vec<(&'static str, Value)> {
    let mut o = Vec::new();
    if let Some(s) = c.seed {
        o.push(("seed", Value::Integer(s as i64)));
    }
    if let Some(p) = &c.out {
        o.push(("out", path_value(p)));
    }
    if let Some(p) = &c.scenario {
        o.push(("data.scenario", path_value(p)));
    }
    if let Some(a) = c.algo {
        o.push(("algo", Value::String(a.to_string())));
    }
    if let Some(e) = c.episodes {
        o.push(("train.episodes", Value::Integer(e as i64)));
    }
    o
}

fn enum_value<T: serde::Serialize>(v: T) -> Value {
    Value::try_from(v).expect("unit variant serializes to a string")
}

/// Parse `args` and run the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::CONFIG } else { exit::OK };
        }
    };
    match execute(cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("hmes: {e}");
            e.exit_code()
        }
    }
}

fn init_logging(quiet: bool) {
    let level = if quiet { log::LevelFilter::Error } else { log::LevelFilter::Info };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
}

/// Run a parsed command.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            common,
            policy,
            checkpoint,
            split,
        } => {
            let mut o = common_overrides(&common);
            if let Some(p) = policy {
                o.push(("simulate.policy", enum_value(p)));
            }
            if let Some(p) = &checkpoint {
                o.push(("simulate.checkpoint", path_value(p)));
            }
            if let Some(s) = split {
                o.push(("simulate.split", enum_value(s)));
            }
            let r = prepare(&common, &o)?;
            cmd_simulate(&r)
        }
        Command::Train { common, timings } => {
            let r = prepare(&common, &common_overrides(&common))?;
            cmd_train(&r, timings)
        }
        Command::Evaluate {
            common,
            checkpoints,
            reference,
        } => {
            let mut o = common_overrides(&common);
            if !checkpoints.is_empty() {
                o.push((
                    "evaluate.checkpoints",
                    Value::Array(checkpoints.iter().map(|p| path_value(p)).collect()),
                ));
            }
            if let Some(r) = reference {
                o.push(("evaluate.reference", Value::String(r)));
            }
            let r = prepare(&common, &o)?;
            cmd_evaluate(&r)
        }
        Command::Analyze { common, checkpoint } => {
            let mut o = common_overrides(&common);
            if let Some(p) = &checkpoint {
                o.push(("analyze.checkpoint", path_value(p)));
            }
            let r = prepare(&common, &o)?;
            cmd_analyze(&r)
        }
    }
}

fn prepare(common: &Common, overrides: &[(&str, Value)]) -> Result<Resolved, CliError> {
    init_logging(common.quiet);
    let r = resolve(common.config.as_deref(), overrides)?;
    std::fs::create_dir_all(&r.config.out)?;
    r.write(&r.config.out)?;
    Ok(r)
}

/// Scenario days of the run and their train/test split.
/// Scenario days from the configured file, or synthetic days otherwise.
pub fn load_days(c: &RunConfig) -> Result<ScenarioSet, CliError> {
    Ok(match &c.data.scenario {
        Some(p) => load_scenarios(p, &c.data.schema, c.env.horizon)?,
        None => generate_synthetic(&c.data.generator, c.data.synthetic_days)?,
    })
}

/// Training and test splits of the configured days.
pub fn load_data(c: &RunConfig) -> Result<(ScenarioSet, ScenarioSet), CliError> {
    Ok(split(&load_days(c)?, c.data.n_train)?)
}

fn load_agent(path: &Path) -> Result<Agent, CliError> {
    let agent: Agent = load_json(path).map_err(|e| match e {
        NnError::Io(e) => CliError::Data(format!("{}: {e}", path.display())),
        other => CliError::Data(format!("{}: {other}", path.display())),
    })?;
    if !agent.is_finite() {
        return Err(CliError::Numerical(format!("{} holds non-finite weights", path.display())));
    }
    Ok(agent)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_days(dir: &Path, name: &str, days: &[DayEval]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(create(dir, name)?);
    for d in days {
        w.serialize(d)?;
    }
    w.flush()?;
    Ok(())
}

fn check_finite(days: &[DayEval]) -> Result<(), CliError> {
    if days.iter().all(|d| d.ret.is_finite() && d.cost.is_finite() && d.penalty.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Numerical("non-finite episode totals".into()))
    }
}

fn cmd_simulate(r: &Resolved) -> Result<(), CliError> {
    let c = &r.config;
    let set = match c.simulate.split {
        SplitKind::All => load_days(c)?,
        SplitKind::Train => load_data(c)?.0,
        SplitKind::Test => load_data(c)?.1,
    };
    let mut policy: Box<dyn Policy> = match c.simulate.policy {
        PolicyKind::Zero => Box::new(IdlePolicy),
        PolicyKind::Random => Box::new(RandomPolicy(substream(c.seed, "policy"))),
        PolicyKind::Checkpoint => {
            let path = c.simulate.checkpoint.as_deref().ok_or_else(|| {
                CliError::Config("policy `checkpoint` needs --checkpoint".into())
            })?;
            Box::new(OwnedAgent(load_agent(path)?))
        }
    };
    let eval = evaluate_method("simulate", policy.as_mut(), &set, &c.env)?;
    check_finite(&eval.days)?;
    write_trace(create(&c.out, "trace.csv")?, &eval.traces)?;
    write_days(&c.out, "summary.csv", &eval.days)?;
    log::info!("simulated {} days into {}", set.len(), c.out.display());
    Ok(())
}

/// Greedy policy of an agent owned by the caller.
struct OwnedAgent(Agent);

impl Policy for OwnedAgent {
    fn act(
        &mut self,
        state: &crate::env::SystemState,
        cfg: &EnvConfig,
    ) -> Result<crate::env::Action, RlError> {
        Policy::act(&mut &self.0, state, cfg)
    }
}

fn cmd_train(r: &Resolved, timings: bool) -> Result<(), CliError> {
    let c = &r.config;
    let (tr, _) = load_data(c)?;
    let out = c.out.clone();
    let every = c.train.checkpoint_every.filter(|&k| k > 0);
    let total = c.train.episodes;
    let hooks = TrainHooks {
        timings,
        on_episode: Some(Box::new(move |ep: usize, agent: &Agent| {
            let done = ep + 1;
            if every.is_some_and(|k| done.is_multiple_of(k) && done < total) {
                save_json(&out.join(format!("checkpoint_ep{done:06}.json")), agent)?;
            }
            if done.is_multiple_of(50) {
                log::info!("episode {done}/{total}");
            }
            Ok(())
        })),
    };
    let (agent, log) = train(c.algo, &tr, &c.env, &c.train, hooks)?;
    let mut w = create(&c.out, "train_log.csv")?;
    write_log(&mut w, &log)?;
    if !agent.is_finite() {
        return Err(CliError::Numerical("training produced non-finite weights".into()));
    }
    save_json(&c.out.join("checkpoint_final.json"), &agent).map_err(RlError::from)?;
    log::info!("trained {} for {} episodes into {}", c.algo, log.len(), c.out.display());
    Ok(())
}

fn read_reference(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h == "cost")
        .ok_or_else(|| CliError::Data(format!("{}: no `cost` column", path.display())))?;
    let mut costs = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let v: f64 = rec[col]
            .trim()
            .parse()
            .map_err(|_| CliError::Data(format!("{}: bad cost `{}`", path.display(), &rec[col])))?;
        costs.push(v);
    }
    if costs.is_empty() {
        return Err(CliError::Data(format!("{}: no reference rows", path.display())));
    }
    Ok(costs)
}

fn cmd_evaluate(r: &Resolved) -> Result<(), CliError> {
    let c = &r.config;
    if c.evaluate.checkpoints.is_empty() {
        return Err(CliError::Config("evaluate needs at least one --checkpoint".into()));
    }
    let (_, te) = load_data(c)?;
    let costs = if c.evaluate.reference == "cem" {
        let mut w = csv::Writer::from_writer(create(&c.out, "reference.csv")?);
        w.write_record(["day_index", "total", "cost", "penalty"])?;
        let mut costs = Vec::new();
        for (i, day) in te.days.iter().enumerate() {
            let res = cem_optimize(day, &c.env, &c.cem)?;
            w.write_record([
                i.to_string(),
                format!("{:?}", res.total),
                format!("{:?}", res.cost),
                format!("{:?}", res.penalty),
            ])?;
            costs.push(res.cost);
        }
        w.flush()?;
        costs
    } else {
        read_reference(Path::new(&c.evaluate.reference))?
    };
    let reference = costs.iter().sum::<f64>() / costs.len() as f64;

    let mut evals: Vec<MethodEvaluation> = Vec::new();
    for path in &c.evaluate.checkpoints {
        let agent = load_agent(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| agent.algo.to_string());
        let e = evaluate_method(&name, &mut &agent, &te, &c.env)?;
        check_finite(&e.days)?;
        evals.push(e);
    }
    let report = build_report(&evals, reference, c.env.lambda_penalty)?;
    report.write_methods(create(&c.out, "comparison.csv")?)?;
    report.write_days(create(&c.out, "days.csv")?)?;
    report.write_soc(create(&c.out, "soc.csv")?)?;
    log::info!("evaluated {} checkpoints into {}", evals.len(), c.out.display());
    Ok(())
}

fn cmd_analyze(r: &Resolved) -> Result<(), CliError> {
    let c = &r.config;
    let path = c
        .analyze
        .checkpoint
        .as_deref()
        .ok_or_else(|| CliError::Config("analyze needs --checkpoint".into()))?;
    let agent = load_agent(path)?;
    let (_, te) = load_data(c)?;
    let x = collect_activations(&agent, &te, c.analysis.n_samples, &c.env)?;
    if !x.iter().all(|v| v.is_finite()) {
        return Err(CliError::Numerical("non-finite activations".into()));
    }
    let g = analyze_samples(x.view(), &c.analysis, derive_seed(c.seed, "kmeans"))?;
    g.write_projection(create(&c.out, "projection.csv")?)?;
    g.write_spectrum(create(&c.out, "spectrum.csv")?)?;
    g.write_silhouette(create(&c.out, "silhouette.csv")?)?;
    log::info!(
        "analysed {} samples: k = {}, silhouette {:.3}",
        x.nrows(),
        g.clusters.centroids.nrows(),
        g.clusters.silhouette
    );
    Ok(())
}
