//! Actor-critic learning: replay, embeddings, DDPG/TD3 updates, the
//! training loop and policy evaluation.

mod agent;
mod buffer;
mod config;
mod evaluate;
mod sr;
mod train;

pub use agent::{Agent, Hyper, RoundStats, Targets};
pub use buffer::{Batch, ReplayBuffer, Transition};
pub use config::{Algo, DayOrder, EmbeddingNorm, NetConfig, TrainConfig};
pub use evaluate::{
    evaluate, gap, rollout, DayEval, EvalReport, IdlePolicy, OpenLoop, Policy, RandomPolicy,
};
pub use sr::{embedding_loss, embedding_loss_const, EmbeddingGrads, SrModules};
pub use train::{tail_mean_return, train, write_log, EpisodeLog, TrainHooks};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::env::EnvError;
use crate::nn::NnError;

#[derive(Debug, Error)]
pub enum RlError {
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("invalid training config: {0}")]
    Config(String),
}

/// Independent random stream `name` derived from a root seed.
///
/// The stream id is the 64-bit FNV-1a hash of the name, so adding a new
/// consumer never shifts the draws of existing ones.
pub fn substream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(h);
    rng
}
