use rand::Rng;
use serde::Serialize;

use super::{Agent, RlError};
use crate::data::{normalize_observation, ScenarioSet};
use crate::env::{Action, EnvConfig, HmesEnv, SystemState, TraceRow, ACTION_DIM};

/// Anything that maps a plant state to an action.
pub trait Policy {
    fn act(&mut self, state: &SystemState, cfg: &EnvConfig) -> Result<Action, RlError>;
}

/// Greedy policy of a trained agent.
impl Policy for &Agent {
    fn act(&mut self, state: &SystemState, cfg: &EnvConfig) -> Result<Action, RlError> {
        let obs = normalize_observation(state, &self.obs_stats, &cfg.devices);
        Ok(Action::from_slice(&self.greedy(&obs)?))
    }
}

/// Uniform actions in `[-1, 1]^5`.
pub struct RandomPolicy<R: Rng>(pub R);

impl<R: Rng> Policy for RandomPolicy<R> {
    fn act(&mut self, _: &SystemState, _: &EnvConfig) -> Result<Action, RlError> {
        let mut a = [0.0; ACTION_DIM];
        for x in &mut a {
            *x = self.0.random_range(-1.0..=1.0);
        }
        Ok(Action(a))
    }
}

/// Always the zero action.
pub struct IdlePolicy;

impl Policy for IdlePolicy {
    fn act(&mut self, _: &SystemState, _: &EnvConfig) -> Result<Action, RlError> {
        Ok(Action::default())
    }
}

/// A fixed action sequence, one entry per slot.
pub struct OpenLoop(pub Vec<Action>);

impl Policy for OpenLoop {
    fn act(&mut self, state: &SystemState, _: &EnvConfig) -> Result<Action, RlError> {
        let t = state.exogenous.hour as usize - 1;
        Ok(self.0.get(t).copied().unwrap_or_default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DayEval {
    pub day_index: usize,
    #[serde(rename = "return")]
    pub ret: f64,
    pub cost: f64,
    pub penalty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub days: Vec<DayEval>,
    pub mean_return: f64,
    pub mean_cost: f64,
    pub mean_penalty: f64,
}

impl EvalReport {
    pub fn from_days(days: Vec<DayEval>) -> Self {
        let n = days.len().max(1) as f64;
        Self {
            mean_return: days.iter().map(|d| d.ret).sum::<f64>() / n,
            mean_cost: days.iter().map(|d| d.cost).sum::<f64>() / n,
            mean_penalty: days.iter().map(|d| d.penalty).sum::<f64>() / n,
            days,
        }
    }

    /// Cost gap against a reference, in percent.
    pub fn gap(&self, reference_cost: f64) -> f64 {
        gap(self.mean_cost, reference_cost)
    }
}

/// `(cost − reference) / reference`, in percent.
pub fn gap(cost: f64, reference: f64) -> f64 {
    (cost - reference) / reference * 100.0
}

/// Roll `policy` through one day, returning the totals and the step trace.
pub fn rollout<P: Policy + ?Sized>(
    policy: &mut P,
    day: &[crate::env::ExogenousRecord],
    day_index: usize,
    cfg: &EnvConfig,
) -> Result<(DayEval, Vec<TraceRow>), RlError> {
    let mut env = HmesEnv::new(*cfg, day)?;
    let mut eval = DayEval {
        day_index,
        ret: 0.0,
        cost: 0.0,
        penalty: 0.0,
    };
    let mut trace = Vec::with_capacity(cfg.horizon);
    loop {
        let state = *env.state();
        let t = env.t();
        let a = policy.act(&state, cfg)?;
        let (out, done) = env.step(&a)?;
        eval.ret += out.reward;
        eval.cost += out.cost;
        eval.penalty += out.penalty;
        trace.push(TraceRow::new(day_index, t, &state, &a, &out));
        if done {
            break;
        }
    }
    Ok((eval, trace))
}

/// Deterministic rollout of every day in `set`.
pub fn evaluate<P: Policy + ?Sized>(
    policy: &mut P,
    set: &ScenarioSet,
    cfg: &EnvConfig,
) -> Result<EvalReport, RlError> {
    let days = set
        .days
        .iter()
        .enumerate()
        .map(|(i, d)| rollout(policy, d, i, cfg).map(|(e, _)| e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EvalReport::from_days(days))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, GeneratorConfig};
    use crate::env::ExogenousRecord;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gap_arithmetic() {
        assert!((gap(534.92, 426.44) - 25.4).abs() < 0.05);
    }

    #[test]
    fn random_policy_costs_nothing_at_zero_prices() {
        let cfg = EnvConfig::default();
        let day: Vec<ExogenousRecord> = (1..=24)
            .map(|h| {
                let mut r = ExogenousRecord::quiet(1, h);
                r.demand_e = 40.0;
                r.demand_h = 30.0;
                r.demand_c = 20.0;
                r
            })
            .collect();
        let set = ScenarioSet::new("zero", vec![day]);
        let mut p = RandomPolicy(ChaCha8Rng::seed_from_u64(1));
        let r = evaluate(&mut p, &set, &cfg).unwrap();
        assert_eq!(r.mean_cost, 0.0);
    }

    #[test]
    fn evaluation_is_repeatable() {
        let cfg = EnvConfig::default();
        let set = generate_synthetic(&GeneratorConfig::default(), 2).unwrap();
        let a = evaluate(&mut IdlePolicy, &set, &cfg).unwrap();
        let b = evaluate(&mut IdlePolicy, &set, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.days.len(), 2);
    }
}
