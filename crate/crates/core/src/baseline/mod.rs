//! Perfect-information reference policies: a cross-entropy trajectory
//! optimiser over whole-day action sequences and an exhaustive grid
//! enumerator that certifies it on tiny instances.
//!
//! Both minimise the day total `Σ (cost + λ·penalty)` accumulated in slot
//! order, so totals from either search and from [`replay`] agree bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{
    Action, EnvConfig, EnvError, ExogenousRecord, HmesEnv, SystemState, TraceRow, ACTION_DIM,
};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("invalid optimiser config: {0}")]
    Config(String),
    #[error("enumeration needs {needed} rollouts, budget is {budget}")]
    Budget { needed: f64, budget: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CemConfig {
    pub population: usize,
    pub elite_frac: f64,
    pub iterations: usize,
    pub init_std: f64,
    pub min_std: f64,
    pub seed: u64,
    /// Planning horizon; the environment horizon when unset.
    pub horizon: Option<usize>,
    /// Restrict samples to these per-dimension levels (nearest level).
    pub grid: Option<Vec<f64>>,
}

impl Default for CemConfig {
    fn default() -> Self {
        Self {
            population: 200,
            elite_frac: 0.1,
            iterations: 40,
            init_std: 0.5,
            min_std: 0.02,
            seed: 0,
            horizon: None,
            grid: None,
        }
    }
}

impl CemConfig {
    pub fn n_elite(&self) -> usize {
        ((self.population as f64 * self.elite_frac).ceil() as usize).max(1)
    }

    pub fn validate(&self) -> Result<(), BaselineError> {
        let bad = |m: &str| Err(BaselineError::Config(m.into()));
        if !(self.elite_frac > 0.0 && self.elite_frac < 1.0) {
            return bad("elite fraction must lie in (0, 1)");
        }
        if (self.population as f64) < 2.0 / self.elite_frac {
            return bad("population must be at least 2 / elite fraction");
        }
        if !(self.init_std >= 0.0 && self.min_std >= 0.0) {
            return bad("standard deviations must be non-negative");
        }
        if let Some(g) = &self.grid {
            if g.is_empty() || g.iter().any(|x| !(-1.0..=1.0).contains(x)) {
                return bad("grid levels must be non-empty and inside [-1, 1]");
            }
        }
        Ok(())
    }
}

/// Best action sequence found and its replay.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub actions: Vec<Action>,
    /// `Σ (cost + λ·penalty)` over the horizon.
    pub total: f64,
    pub cost: f64,
    pub penalty: f64,
    pub trace: Vec<TraceRow>,
    /// Number of full-sequence rollouts evaluated.
    pub rollouts: u64,
    /// Best total after each iteration (CEM only).
    pub history: Vec<f64>,
}

/// Totals of one replayed sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub total: f64,
    pub cost: f64,
    pub penalty: f64,
    pub trace: Vec<TraceRow>,
}

fn slot_total(out: &crate::env::StepOutcome, cfg: &EnvConfig) -> f64 {
    out.cost + cfg.lambda_penalty * out.penalty
}

/// Roll a fixed action sequence through the day from its initial state.
pub fn replay(
    day: &[ExogenousRecord],
    actions: &[Action],
    cfg: &EnvConfig,
) -> Result<Replay, BaselineError> {
    let mut env = HmesEnv::new(*cfg, day)?;
    let mut r = Replay {
        total: 0.0,
        cost: 0.0,
        penalty: 0.0,
        trace: Vec::with_capacity(actions.len()),
    };
    for a in actions {
        let state = *env.state();
        let t = env.t();
        let (out, _) = env.step(a)?;
        r.total += slot_total(&out, cfg);
        r.cost += out.cost;
        r.penalty += out.penalty;
        r.trace.push(TraceRow::new(0, t, &state, a, &out));
    }
    Ok(r)
}

fn total_of(day: &[ExogenousRecord], actions: &[Action], cfg: &EnvConfig) -> f64 {
    // Same slot order and accumulation as `replay`.
    let mut state = crate::env::reset(day, cfg).expect("validated by caller");
    let mut total = 0.0;
    for (t, a) in actions.iter().enumerate() {
        let next = day[(t + 1).min(cfg.horizon - 1)];
        let out = crate::env::step(&state, a, next, cfg);
        total += slot_total(&out, cfg);
        state = out.next_state;
    }
    total
}

fn finish(
    day: &[ExogenousRecord],
    actions: Vec<Action>,
    cfg: &EnvConfig,
    rollouts: u64,
    history: Vec<f64>,
) -> Result<OracleResult, BaselineError> {
    let r = replay(day, &actions, cfg)?;
    Ok(OracleResult {
        actions,
        total: r.total,
        cost: r.cost,
        penalty: r.penalty,
        trace: r.trace,
        rollouts,
        history,
    })
}

fn snap(x: f64, grid: &[f64]) -> f64 {
    let mut best = grid[0];
    for &g in &grid[1..] {
        if (g - x).abs() < (best - x).abs() {
            best = g;
        }
    }
    best
}

/// Cross-entropy search over action sequences for one known day.
pub fn cem_optimize(
    day: &[ExogenousRecord],
    env_cfg: &EnvConfig,
    cem: &CemConfig,
) -> Result<OracleResult, BaselineError> {
    cem.validate()?;
    let mut cfg = *env_cfg;
    if let Some(h) = cem.horizon {
        cfg.horizon = h;
    }
    crate::env::reset(day, &cfg)?;
    let h = cfg.horizon;
    let dim = h * ACTION_DIM;
    let project = |x: f64| {
        let c = x.clamp(-1.0, 1.0);
        match &cem.grid {
            Some(g) => snap(c, g),
            None => c,
        }
    };
    let to_actions = |v: &[f64]| -> Vec<Action> { v.chunks(ACTION_DIM).map(Action::from_slice).collect() };

    let mut rng = ChaCha8Rng::seed_from_u64(cem.seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut mean = vec![0.0; dim];
    let mut std = vec![cem.init_std; dim];
    let mut best: Vec<f64> = mean.iter().map(|&m| project(m)).collect();
    let mut best_total = total_of(day, &to_actions(&best), &cfg);
    let mut rollouts = 1u64;
    let mut history = Vec::with_capacity(cem.iterations);
    let n_elite = cem.n_elite();

    for _ in 0..cem.iterations {
        let mut pop: Vec<(f64, Vec<f64>)> = Vec::with_capacity(cem.population);
        for k in 0..cem.population {
            let x: Vec<f64> = if k == 0 {
                mean.iter().map(|&m| project(m)).collect()
            } else {
                (0..dim)
                    .map(|j| project(mean[j] + std[j] * unit.sample(&mut rng)))
                    .collect()
            };
            let total = total_of(day, &to_actions(&x), &cfg);
            pop.push((total, x));
        }
        rollouts += cem.population as u64;
        pop.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pop[0].0 < best_total {
            best_total = pop[0].0;
            best = pop[0].1.clone();
        }
        history.push(best_total);
        let elites = &pop[..n_elite];
        for j in 0..dim {
            let m = elites.iter().map(|e| e.1[j]).sum::<f64>() / n_elite as f64;
            let v = elites.iter().map(|e| (e.1[j] - m).powi(2)).sum::<f64>() / n_elite as f64;
            mean[j] = m;
            std[j] = v.sqrt().max(cem.min_std);
        }
    }
    let result = finish(day, to_actions(&best), &cfg, rollouts, history)?;
    debug_assert_eq!(result.total, best_total);
    Ok(result)
}

/// Evenly spaced levels on `[-1, 1]`; a single level is 0.
pub fn grid_levels(g: usize) -> Vec<f64> {
    match g {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..g).map(|k| -1.0 + 2.0 * k as f64 / (g - 1) as f64).collect(),
    }
}

/// Largest number of full rollouts [`exhaustive_search`] accepts.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// Exact optimum over every sequence on a per-dimension grid of `g`
/// levels for the first `h` slots of `day`.
pub fn exhaustive_search(
    day: &[ExogenousRecord],
    h: usize,
    g: usize,
    env_cfg: &EnvConfig,
) -> Result<OracleResult, BaselineError> {
    if h == 0 || g == 0 {
        return Err(BaselineError::Config("horizon and grid size must be positive".into()));
    }
    let needed = (g as f64).powi((ACTION_DIM * h) as i32);
    if needed > ENUMERATION_BUDGET as f64 {
        return Err(BaselineError::Budget {
            needed,
            budget: ENUMERATION_BUDGET,
        });
    }
    let mut cfg = *env_cfg;
    cfg.horizon = h;
    let start = crate::env::reset(day, &cfg)?;
    let levels = grid_levels(g);
    let actions: Vec<Action> = (0..(g as u64).pow(ACTION_DIM as u32))
        .map(|mut code| {
            let mut a = [0.0; ACTION_DIM];
            for x in &mut a {
                *x = levels[(code % g as u64) as usize];
                code /= g as u64;
            }
            Action(a)
        })
        .collect();

    struct Search<'a> {
        day: &'a [ExogenousRecord],
        cfg: &'a EnvConfig,
        actions: &'a [Action],
        prefix: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
        rollouts: u64,
    }

    impl Search<'_> {
        fn go(&mut self, state: &SystemState, t: usize, acc: f64) {
            let h = self.cfg.horizon;
            if t == h {
                self.rollouts += 1;
                if self.best.as_ref().is_none_or(|(b, _)| acc < *b) {
                    self.best = Some((acc, self.prefix.clone()));
                }
                return;
            }
            let next = self.day[(t + 1).min(h - 1)];
            for i in 0..self.actions.len() {
                let out = crate::env::step(state, &self.actions[i], next, self.cfg);
                self.prefix.push(i);
                self.go(&out.next_state, t + 1, acc + slot_total(&out, self.cfg));
                self.prefix.pop();
            }
        }
    }

    let mut s = Search {
        day,
        cfg: &cfg,
        actions: &actions,
        prefix: Vec::with_capacity(h),
        best: None,
        rollouts: 0,
    };
    s.go(&start, 0, 0.0);
    let (_, idx) = s.best.expect("at least one sequence");
    let seq = idx.into_iter().map(|i| actions[i]).collect();
    finish(day, seq, &cfg, s.rollouts, Vec::new())
}
