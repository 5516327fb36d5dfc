use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Learning algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Ddpg,
    Td3,
    SrDdpg,
    SrTd3,
}

impl Algo {
    pub const ALL: [Algo; 4] = [Algo::Ddpg, Algo::Td3, Algo::SrDdpg, Algo::SrTd3];

    pub fn is_td3(self) -> bool {
        matches!(self, Algo::Td3 | Algo::SrTd3)
    }

    pub fn uses_sr(self) -> bool {
        matches!(self, Algo::SrDdpg | Algo::SrTd3)
    }

    pub fn name(self) -> &'static str {
        match self {
            Algo::Ddpg => "ddpg",
            Algo::Td3 => "td3",
            Algo::SrDdpg => "sr-ddpg",
            Algo::SrTd3 => "sr-td3",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected ddpg, td3, sr-ddpg or sr-td3)"))
    }
}

/// Norm used by the embedding loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingNorm {
    #[default]
    Euclidean,
    SquaredEuclidean,
}

/// Hidden widths of every network. `embedding` lists the hidden widths of
/// both embeddings followed by the latent width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub embedding: Vec<usize>,
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self {
            embedding: vec![256, 256, 256, 512],
            actor_hidden: vec![512],
            critic_hidden: vec![512, 512],
        }
    }
}

impl NetConfig {
    /// Small networks for desk-scale experiments.
    pub fn reduced() -> Self {
        Self {
            embedding: vec![64, 64, 128],
            actor_hidden: vec![128],
            critic_hidden: vec![128, 128],
        }
    }

    pub fn latent(&self) -> usize {
        *self.embedding.last().expect("embedding widths are non-empty")
    }

    pub fn validate(&self) -> Result<(), String> {
        let all = self
            .embedding
            .iter()
            .chain(&self.actor_hidden)
            .chain(&self.critic_hidden);
        if self.embedding.is_empty() || all.clone().any(|&w| w == 0) {
            return Err("network widths must be positive and the latent width given".into());
        }
        Ok(())
    }
}

/// How training days are drawn from the training split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DayOrder {
    #[default]
    RoundRobin,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub episodes: usize,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Warm-up size; updates start once the buffer holds more transitions.
    /// Defaults to the batch size.
    pub n_min: Option<usize>,
    pub gamma: f64,
    pub lr_actor: f64,
    pub lr_critic: f64,
    pub lr_embedding: f64,
    pub tau: f64,
    /// Exploration noise std at the first and last episode.
    pub noise_std: f64,
    pub noise_std_final: f64,
    /// Target policy smoothing noise and its clip bound.
    pub policy_noise: f64,
    pub noise_clip: f64,
    pub policy_delay: usize,
    /// Overrides the environment penalty weight when set.
    pub lambda_penalty: Option<f64>,
    /// Multiplier applied to rewards before they enter the buffer.
    pub reward_scale: f64,
    pub embedding_norm: EmbeddingNorm,
    pub nets: NetConfig,
    pub day_order: DayOrder,
    /// Write a checkpoint every this many episodes.
    pub checkpoint_every: Option<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            episodes: 2500,
            batch_size: 1024,
            buffer_capacity: 1_000_000,
            n_min: None,
            gamma: 1.0,
            lr_actor: 3e-4,
            lr_critic: 3e-4,
            lr_embedding: 3e-4,
            tau: 0.01,
            noise_std: 0.1,
            noise_std_final: 0.01,
            policy_noise: 0.2,
            noise_clip: 0.5,
            policy_delay: 2,
            lambda_penalty: None,
            reward_scale: 1.0,
            embedding_norm: EmbeddingNorm::Euclidean,
            nets: NetConfig::default(),
            day_order: DayOrder::RoundRobin,
            checkpoint_every: None,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn n_min(&self) -> usize {
        self.n_min.unwrap_or(self.batch_size)
    }

    /// Exploration std for `episode` of `episodes`, linear in between.
    pub fn noise_at(&self, episode: usize) -> f64 {
        if self.episodes <= 1 {
            return self.noise_std;
        }
        let f = episode as f64 / (self.episodes - 1) as f64;
        self.noise_std + (self.noise_std_final - self.noise_std) * f.min(1.0)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err("gamma must lie in [0, 1]".into());
        }
        if self.batch_size == 0 || self.batch_size > self.buffer_capacity {
            return Err("batch size must be positive and at most the buffer capacity".into());
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err("tau must lie in [0, 1]".into());
        }
        if self.policy_delay == 0 {
            return Err("policy delay must be at least 1".into());
        }
        for (n, v) in [
            ("noise_std", self.noise_std),
            ("noise_std_final", self.noise_std_final),
            ("policy_noise", self.policy_noise),
            ("noise_clip", self.noise_clip),
        ] {
            if !(v >= 0.0) {
                return Err(format!("{n} must be non-negative"));
            }
        }
        for (n, v) in [
            ("lr_actor", self.lr_actor),
            ("lr_critic", self.lr_critic),
            ("lr_embedding", self.lr_embedding),
            ("reward_scale", self.reward_scale),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{n} must be positive"));
            }
        }
        self.nets.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algo_names_round_trip() {
        for a in Algo::ALL {
            assert_eq!(a.name().parse::<Algo>().unwrap(), a);
        }
        assert!("ppo".parse::<Algo>().is_err());
    }

    #[test]
    fn noise_decays_linearly() {
        let cfg = TrainConfig {
            episodes: 11,
            ..Default::default()
        };
        assert_eq!(cfg.noise_at(0), 0.1);
        assert!((cfg.noise_at(10) - 0.01).abs() < 1e-15);
        assert!((cfg.noise_at(5) - 0.055).abs() < 1e-15);
    }

    #[test]
    fn defaults_are_valid() {
        let cfg = TrainConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.n_min(), 1024);
        assert_eq!(cfg.nets.latent(), 512);
        let bad = TrainConfig {
            gamma: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
