use std::io::Write;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use super::{substream, Agent, Algo, DayOrder, ReplayBuffer, RlError, TrainConfig, Transition};
use crate::data::{normalize_observation, ObsStats, ScenarioSet, OBS_DIM};
use crate::env::{Action, EnvConfig, HmesEnv, ACTION_DIM};

/// One row of the training log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub day_index: usize,
    #[serde(rename = "return")]
    pub ret: f64,
    pub cost: f64,
    pub penalty: f64,
    /// Means over the update rounds of the episode; empty before warm-up.
    pub embedding_loss: Option<f64>,
    pub critic_loss: Option<f64>,
    pub actor_objective: Option<f64>,
    /// Seconds spent on the episode, when timing is enabled.
    pub wall_time: Option<f64>,
}

pub fn write_log<W: Write>(w: W, rows: &[EpisodeLog]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Default)]
struct Mean {
    sum: f64,
    n: usize,
}

impl Mean {
    fn add(&mut self, x: f64) {
        self.sum += x;
        self.n += 1;
    }

    fn get(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

/// Callback run after every episode with its index and the agent.
pub type EpisodeHook<'a> = Box<dyn FnMut(usize, &Agent) -> Result<(), RlError> + 'a>;

/// Options that affect bookkeeping but not the learned agent.
#[derive(Default)]
pub struct TrainHooks<'a> {
    /// Record wall-clock seconds per episode in the log.
    pub timings: bool,
    /// Called after every episode with its index and the agent.
    pub on_episode: Option<EpisodeHook<'a>>,
}

/// Train a fresh agent on the days of `train_set`.
///
/// Every environment step stores its transition; once the buffer holds
/// more than the warm-up size, each step also runs one update round.
pub fn train(
    algo: Algo,
    train_set: &ScenarioSet,
    env_cfg: &EnvConfig,
    cfg: &TrainConfig,
    mut hooks: TrainHooks<'_>,
) -> Result<(Agent, Vec<EpisodeLog>), RlError> {
    cfg.validate().map_err(RlError::Config)?;
    if train_set.is_empty() {
        return Err(RlError::Config("training split has no days".into()));
    }
    let mut env_cfg = *env_cfg;
    if let Some(l) = cfg.lambda_penalty {
        env_cfg.lambda_penalty = l;
    }
    env_cfg.validate().map_err(RlError::Config)?;
    let params = env_cfg.devices;
    let stats = ObsStats::fit(train_set, &params);

    let mut init_rng = substream(cfg.seed, "init");
    let mut explore_rng = substream(cfg.seed, "explore");
    let mut replay_rng = substream(cfg.seed, "replay");
    let mut target_rng = substream(cfg.seed, "target-noise");
    let mut day_rng = substream(cfg.seed, "days");

    let mut agent = Agent::new(algo, OBS_DIM, ACTION_DIM, stats.clone(), cfg, &mut init_rng);
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity);
    let mut log = Vec::with_capacity(cfg.episodes);

    for episode in 0..cfg.episodes {
        let started = Instant::now();
        let day_index = match cfg.day_order {
            DayOrder::RoundRobin => episode % train_set.len(),
            DayOrder::Uniform => day_rng.random_range(0..train_set.len()),
        };
        let mut env = HmesEnv::new(env_cfg, &train_set.days[day_index])?;
        let noise = cfg.noise_at(episode);
        let (mut ret, mut cost, mut penalty) = (0.0, 0.0, 0.0);
        let (mut emb, mut critic, mut actor) = (Mean::default(), Mean::default(), Mean::default());
        let mut obs = normalize_observation(env.state(), &stats, &params).to_vec();
        loop {
            let a = agent.select_action(&obs, noise, &mut explore_rng)?;
            let (out, done) = env.step(&Action::from_slice(&a))?;
            let obs_next = normalize_observation(&out.next_state, &stats, &params).to_vec();
            ret += out.reward;
            cost += out.cost;
            penalty += out.penalty;
            buffer.push(Transition {
                s: obs,
                a,
                r: out.reward * cfg.reward_scale,
                s_next: obs_next.clone(),
                terminal: done,
            });
            if buffer.len() > cfg.n_min() {
                let batch = buffer.sample(cfg.batch_size, &mut replay_rng);
                let r = agent.update_round(&batch, &mut target_rng)?;
                if let Some(x) = r.embedding_loss {
                    emb.add(x);
                }
                critic.add(r.critic_loss);
                if let Some(x) = r.actor_objective {
                    actor.add(x);
                }
            }
            obs = obs_next;
            if done {
                break;
            }
        }
        let row = EpisodeLog {
            episode,
            day_index,
            ret,
            cost,
            penalty,
            embedding_loss: emb.get(),
            critic_loss: critic.get(),
            actor_objective: actor.get(),
            wall_time: hooks.timings.then(|| started.elapsed().as_secs_f64()),
        };
        log::debug!(
            "{algo} episode {episode}: return {:.3}, cost {:.3}, penalty {:.3}",
            row.ret,
            row.cost,
            row.penalty
        );
        log.push(row);
        if let Some(f) = hooks.on_episode.as_mut() {
            f(episode, &agent)?;
        }
    }
    if agent.incidents > 0 {
        log::warn!("{} optimiser steps skipped for non-finite gradients", agent.incidents);
    }
    Ok((agent, log))
}

/// Mean return over the last `k` logged episodes.
pub fn tail_mean_return(log: &[EpisodeLog], k: usize) -> f64 {
    let tail = &log[log.len().saturating_sub(k)..];
    tail.iter().map(|r| r.ret).sum::<f64>() / tail.len().max(1) as f64
}
