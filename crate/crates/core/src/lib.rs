//! Simulation and learning stack for a hydrogen-based multi-energy system.
//!
//! * [`devices`]: stateless device equations (storages, electrolyzer, tank,
//!   fuel cell, chiller, solar).
//! * [`env`]: the plant as a decision process with penalised reward.
//! * [`data`]: scenario files, synthetic profiles, splits, observation scaling.
//! * [`nn`]: small dense networks with reverse-mode gradients and Adam.
//! * [`rl`]: DDPG/TD3 agents with optional state and state-action embeddings.
//! * [`baseline`]: perfect-information reference optimisers.
//! * [`analysis`]: activation PCA, k-means and evaluation reports.
//! * [`cli`]: the `hmes` command-line front end.

pub mod devices;
pub mod env;
pub mod data;
pub mod nn;
pub mod rl;
pub mod baseline;
pub mod analysis;
pub mod cli;
