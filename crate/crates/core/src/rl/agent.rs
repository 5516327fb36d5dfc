use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Algo, Batch, RlError, SrModules, TrainConfig};
use crate::data::ObsStats;
use crate::nn::{adam_step, soft_update, Activation, AdamState, Mlp, NnError};

/// Update constants carried by an agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub gamma: f64,
    pub tau: f64,
    pub policy_noise: f64,
    pub noise_clip: f64,
    pub policy_delay: usize,
}

impl From<&TrainConfig> for Hyper {
    fn from(c: &TrainConfig) -> Self {
        Self {
            gamma: c.gamma,
            tau: c.tau,
            policy_noise: c.policy_noise,
            noise_clip: c.noise_clip,
            policy_delay: c.policy_delay,
        }
    }
}

/// Bellman targets of one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Targets {
    /// Target used for regression (minimum over critics for TD3).
    pub y: Array1<f64>,
    /// The same target built from the first critic alone.
    pub y_first: Array1<f64>,
}

/// Losses and objective of one update round. `None` when the step did not
/// run this round.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoundStats {
    pub embedding_loss: Option<f64>,
    pub critic_loss: f64,
    pub actor_objective: Option<f64>,
}

/// Actor-critic agent: DDPG or TD3, optionally with embeddings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub algo: Algo,
    pub obs_dim: usize,
    pub action_dim: usize,
    pub actor: Mlp,
    pub actor_target: Mlp,
    pub actor_opt: AdamState,
    pub critics: Vec<Mlp>,
    pub critic_targets: Vec<Mlp>,
    pub critic_opts: Vec<AdamState>,
    pub sr: Option<SrModules>,
    pub hyper: Hyper,
    /// Observation scaling the agent was trained with.
    pub obs_stats: ObsStats,
    /// Completed update rounds.
    pub rounds: u64,
    /// Optimiser steps skipped because of non-finite gradients.
    pub incidents: u64,
}

impl Agent {
    pub fn new<R: Rng + ?Sized>(
        algo: Algo,
        obs_dim: usize,
        action_dim: usize,
        obs_stats: ObsStats,
        cfg: &TrainConfig,
        rng: &mut R,
    ) -> Self {
        let sr = algo.uses_sr().then(|| {
            SrModules::new(
                obs_dim,
                action_dim,
                &cfg.nets.embedding,
                cfg.lr_embedding,
                cfg.embedding_norm,
                rng,
            )
        });
        let latent = sr.as_ref().map_or(0, |m| m.latent());

        let mut actor_w = vec![obs_dim + latent];
        actor_w.extend_from_slice(&cfg.nets.actor_hidden);
        actor_w.push(action_dim);
        let mut actor = Mlp::new(&actor_w, Activation::Relu, Activation::Tanh, rng);
        actor.scale_last_layer(0.01);

        let mut critic_w = vec![obs_dim + action_dim + 2 * latent];
        critic_w.extend_from_slice(&cfg.nets.critic_hidden);
        critic_w.push(1);
        let n_critics = if algo.is_td3() { 2 } else { 1 };
        let critics: Vec<Mlp> = (0..n_critics)
            .map(|_| Mlp::new(&critic_w, Activation::Relu, Activation::Identity, rng))
            .collect();

        Self {
            algo,
            obs_dim,
            action_dim,
            actor_target: actor.clone(),
            actor_opt: AdamState::new(&actor, cfg.lr_actor),
            actor,
            critic_targets: critics.clone(),
            critic_opts: critics
                .iter()
                .map(|c| AdamState::new(c, cfg.lr_critic))
                .collect(),
            critics,
            sr,
            hyper: Hyper::from(cfg),
            obs_stats,
            rounds: 0,
            incidents: 0,
        }
    }

    fn latent(&self) -> usize {
        self.sr.as_ref().map_or(0, |m| m.latent())
    }

    /// `z_s = Φ(s)`, or `None` for a vanilla agent.
    pub fn embed_state(&self, s: ArrayView2<f64>) -> Result<Option<Array2<f64>>, NnError> {
        self.sr.as_ref().map(|m| m.embed_state(s)).transpose()
    }

    fn actor_input(s: ArrayView2<f64>, z_s: Option<&Array2<f64>>) -> Array2<f64> {
        match z_s {
            Some(z) => concatenate![Axis(1), s, z.view()],
            None => s.to_owned(),
        }
    }

    fn critic_input(
        s: ArrayView2<f64>,
        a: ArrayView2<f64>,
        z: Option<(&Array2<f64>, &Array2<f64>)>,
    ) -> Array2<f64> {
        match z {
            Some((z_s, z_sa)) => concatenate![Axis(1), s, a, z_s.view(), z_sa.view()],
            None => concatenate![Axis(1), s, a],
        }
    }

    /// Deterministic actions of the online actor for a batch of observations.
    pub fn act(&self, s: ArrayView2<f64>) -> Result<Array2<f64>, NnError> {
        let z_s = self.embed_state(s)?;
        self.actor.predict(Self::actor_input(s, z_s.as_ref()).view())
    }

    /// Post-activation output of the actor's first hidden layer.
    pub fn actor_first_layer(&self, s: ArrayView2<f64>) -> Result<Array2<f64>, NnError> {
        let z_s = self.embed_state(s)?;
        let (_, cache) = self.actor.forward(Self::actor_input(s, z_s.as_ref()).view())?;
        Ok(cache.hidden(0).clone())
    }

    /// Noise-free action for one observation, clipped to `[-1, 1]`.
    pub fn greedy(&self, obs: &[f64]) -> Result<Vec<f64>, NnError> {
        let view = ArrayView2::from_shape((1, obs.len()), obs).expect("row shape");
        let a = self.act(view)?.into_raw_vec_and_offset().0;
        Ok(a.into_iter().map(|x| x.clamp(-1.0, 1.0)).collect())
    }

    /// Action for one observation. A positive `noise_std` adds independent
    /// Gaussian noise per dimension; the result is clipped to `[-1, 1]`.
    pub fn select_action<R: Rng + ?Sized>(
        &self,
        obs: &[f64],
        noise_std: f64,
        rng: &mut R,
    ) -> Result<Vec<f64>, NnError> {
        let view = ArrayView2::from_shape((1, obs.len()), obs).expect("row shape");
        let mut a = self.act(view)?.into_raw_vec_and_offset().0;
        if noise_std > 0.0 {
            let n = Normal::new(0.0, noise_std).expect("finite std");
            for x in &mut a {
                *x += n.sample(rng);
            }
        }
        for x in &mut a {
            *x = x.clamp(-1.0, 1.0);
        }
        Ok(a)
    }

    /// Q-values of every online critic on `(s, a)` with current embeddings.
    pub fn q_values(&self, s: ArrayView2<f64>, a: ArrayView2<f64>) -> Result<Vec<Array1<f64>>, NnError> {
        let input = self.critic_features(s, a)?;
        self.critics
            .iter()
            .map(|c| Ok(c.predict(input.view())?.column(0).to_owned()))
            .collect()
    }

    fn critic_features(&self, s: ArrayView2<f64>, a: ArrayView2<f64>) -> Result<Array2<f64>, NnError> {
        match &self.sr {
            Some(m) => {
                let z_s = m.embed_state(s)?;
                let z_sa = m.embed_pair(z_s.view(), a)?;
                Ok(Self::critic_input(s, a, Some((&z_s, &z_sa))))
            }
            None => Ok(Self::critic_input(s, a, None)),
        }
    }

    /// Bellman targets from the target actor and critics with the current
    /// embeddings. TD3 adds clipped Gaussian smoothing noise to the target
    /// action; the noise sample is shared by `y` and `y_first`.
    pub fn targets<R: Rng + ?Sized>(&self, batch: &Batch, rng: &mut R) -> Result<Targets, NnError> {
        let h = &self.hyper;
        let s2 = batch.s_next.view();
        let z_s2 = self.embed_state(s2)?;
        let mut a2 = self
            .actor_target
            .predict(Self::actor_input(s2, z_s2.as_ref()).view())?;
        if self.algo.is_td3() && h.policy_noise > 0.0 && h.noise_clip > 0.0 {
            let n = Normal::new(0.0, h.policy_noise).expect("finite std");
            a2.mapv_inplace(|x| {
                let eps = n.sample(rng).clamp(-h.noise_clip, h.noise_clip);
                (x + eps).clamp(-1.0, 1.0)
            });
        }
        let input = match (&self.sr, &z_s2) {
            (Some(m), Some(z)) => {
                let z_sa2 = m.embed_pair(z.view(), a2.view())?;
                Self::critic_input(s2, a2.view(), Some((z, &z_sa2)))
            }
            _ => Self::critic_input(s2, a2.view(), None),
        };
        let qs: Vec<Array1<f64>> = self
            .critic_targets
            .iter()
            .map(|c| Ok(c.predict(input.view())?.column(0).to_owned()))
            .collect::<Result<_, NnError>>()?;
        let q_min = qs
            .iter()
            .skip(1)
            .fold(qs[0].clone(), |acc, q| {
                acc.iter().zip(q).map(|(&x, &y)| x.min(y)).collect()
            });
        let mask = batch.done.mapv(|d| h.gamma * (1.0 - d));
        Ok(Targets {
            y: &batch.r + &(&mask * &q_min),
            y_first: &batch.r + &(&mask * &qs[0]),
        })
    }

    fn step_opt(net: &mut Mlp, g: &crate::nn::Gradients, opt: &mut AdamState, incidents: &mut u64) -> Result<(), NnError> {
        if !adam_step(net, g, opt)? {
            *incidents += 1;
            log::warn!("non-finite gradient; update skipped");
        }
        Ok(())
    }

    /// Regress every critic onto the shared target. Returns one mean
    /// squared Bellman error per critic, measured before the step.
    pub fn critic_update<R: Rng + ?Sized>(&mut self, batch: &Batch, rng: &mut R) -> Result<Vec<f64>, NnError> {
        let y = self.targets(batch, rng)?.y;
        let input = self.critic_features(batch.s.view(), batch.a.view())?;
        let n = batch.len() as f64;
        let mut losses = Vec::with_capacity(self.critics.len());
        for k in 0..self.critics.len() {
            let (q, cache) = self.critics[k].forward(input.view())?;
            let err = &q.column(0) - &y;
            losses.push(err.mapv(|e| e * e).sum() / n);
            let dout = (err * (2.0 / n)).insert_axis(Axis(1));
            let g = self.critics[k].backward(&cache, dout.view())?;
            Self::step_opt(&mut self.critics[k], &g, &mut self.critic_opts[k], &mut self.incidents)?;
        }
        Ok(losses)
    }

    /// Ascend the mean first-critic value of the actor's actions. The
    /// action gradient includes the path through `z_sa = Ψ(z_s, a)`;
    /// embedding and critic parameters stay fixed.
    pub fn actor_update(&mut self, batch: &Batch) -> Result<f64, NnError> {
        let s = batch.s.view();
        let n = batch.len() as f64;
        let (od, ad, lat) = (self.obs_dim, self.action_dim, self.latent());
        let z_s = self.embed_state(s)?;
        let (a, actor_cache) = self.actor.forward(Self::actor_input(s, z_s.as_ref()).view())?;

        let (input, psi_cache) = match (&self.sr, &z_s) {
            (Some(m), Some(z)) => {
                let (z_sa, cache) = m.psi.forward(concatenate![Axis(1), z.view(), a.view()].view())?;
                (Self::critic_input(s, a.view(), Some((z, &z_sa))), Some(cache))
            }
            _ => (Self::critic_input(s, a.view(), None), None),
        };
        let critic = &self.critics[0];
        let (q, critic_cache) = critic.forward(input.view())?;
        let objective = q.sum() / n;
        let dq = Array2::from_elem((batch.len(), 1), -1.0 / n);
        let gc = critic.backward(&critic_cache, dq.view())?;
        let gin = gc.input.expect("input cotangent");
        let mut da = gin.slice(s![.., od..od + ad]).to_owned();
        if let (Some(m), Some(cache)) = (&self.sr, &psi_cache) {
            let dz_sa = gin.slice(s![.., od + ad + lat..]).to_owned();
            let gp = m.psi.backward(cache, dz_sa.view())?;
            da += &gp.input.expect("input cotangent").slice(s![.., lat..]);
        }
        let ga = self.actor.backward(&actor_cache, da.view())?;
        Self::step_opt(&mut self.actor, &ga, &mut self.actor_opt, &mut self.incidents)?;
        Ok(objective)
    }

    pub fn soft_update_targets(&mut self) -> Result<(), NnError> {
        let tau = self.hyper.tau;
        soft_update(&mut self.actor_target, &self.actor, tau)?;
        for (t, c) in self.critic_targets.iter_mut().zip(&self.critics) {
            soft_update(t, c, tau)?;
        }
        Ok(())
    }

    /// Whether the actor and targets update on round `k` (1-based).
    pub fn actor_due(&self, k: u64) -> bool {
        !self.algo.is_td3() || k.is_multiple_of(self.hyper.policy_delay as u64)
    }

    /// One update round: embeddings, critics, then (on schedule) the actor
    /// and the soft target updates.
    pub fn update_round<R: Rng + ?Sized>(&mut self, batch: &Batch, rng: &mut R) -> Result<RoundStats, RlError> {
        self.rounds += 1;
        let mut stats = RoundStats::default();
        if let Some(m) = &mut self.sr {
            let (loss, ok) = m.update(batch)?;
            if !ok {
                self.incidents += 1;
                log::warn!("non-finite embedding gradient; update skipped");
            }
            stats.embedding_loss = Some(loss);
        }
        let losses = self.critic_update(batch, rng)?;
        stats.critic_loss = losses.iter().sum::<f64>() / losses.len() as f64;
        if self.actor_due(self.rounds) {
            stats.actor_objective = Some(self.actor_update(batch)?);
            self.soft_update_targets()?;
        }
        Ok(stats)
    }

    pub fn is_finite(&self) -> bool {
        self.actor.is_finite()
            && self.critics.iter().all(Mlp::is_finite)
            && self
                .sr
                .as_ref()
                .is_none_or(|m| m.phi.is_finite() && m.psi.is_finite())
    }
}
