//! The plant as a sequential decision process: state, action decoding,
//! transition and penalised reward.

mod decode;
mod reward;
mod trace;
mod types;

pub use decode::{balance_residuals, decode_action};
pub use reward::{reward_and_penalty, slot_cost, violations, PhysicsSnapshot, RewardTerms};
pub use trace::{write_trace, TraceRow, TRACE_COLUMNS};
pub use types::{
    Action, DecodedAction, EnvConfig, ExogenousRecord, StepOutcome, SystemState, Violations,
    ACTION_DIM,
};

use thiserror::Error;

use crate::devices::{
    el_overload_step, el_stack_current, el_temperature_step, storage_step, tank_pressure,
    tank_step, tank_temperature_step, PA_PER_BAR,
};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("scenario has {got} records but the horizon needs {needed}")]
    ScenarioTooShort { needed: usize, got: usize },
    #[error("invalid environment config: {0}")]
    Config(String),
    #[error("episode finished; call reset")]
    EpisodeDone,
}

/// Initial state for a day: storages at their initial levels, electrolyzer
/// cold and unloaded, exogenous fields from the first record.
pub fn reset(day: &[ExogenousRecord], config: &EnvConfig) -> Result<SystemState, EnvError> {
    config.validate().map_err(EnvError::Config)?;
    if day.len() < config.horizon {
        return Err(EnvError::ScenarioTooShort {
            needed: config.horizon,
            got: day.len(),
        });
    }
    Ok(SystemState::initial(day[0], &config.devices))
}

/// Apply already-decoded setpoints and advance every state variable.
pub fn advance(
    state: &SystemState,
    d: &DecodedAction,
    next_exo: ExogenousRecord,
    config: &EnvConfig,
) -> StepOutcome {
    let dev = &config.devices;
    let dt = config.dt;
    let el = &dev.electrolyzer;

    let el_current = el_stack_current(d.p_ely, state.el_temp, el);
    let el_overload = el_overload_step(state.el_overload, el_current, el, dt);
    let el_temp = el_temperature_step(state.el_temp, d.p_ely, el);

    let level = |lvl: f64, f: &crate::devices::StorageFlow, p: &crate::devices::StorageParams| {
        storage_step(lvl, f.ch, f.dis, p, dt)
            .expect("decoded storage flows are complementary")
            .clamp(p.s_min, p.s_max)
    };
    let s_ess = level(state.s_ess, &d.ess, &dev.ess);
    let s_tes = level(state.s_tes, &d.tes, &dev.tes);
    let s_ces = level(state.s_ces, &d.ces, &dev.ces);
    let s_hss = tank_step(state.s_hss, d.v_ely, d.v_fc, d.v_buy, el.alpha, dt)
        .clamp(dev.hss.s_min, dev.hss.s_max);

    let tank_temp = tank_temperature_step(state.tank_temp, state.exogenous.t_amb, &dev.tank);
    let tank_pressure_bar = tank_pressure(tank_temp, s_hss, &dev.tank) / PA_PER_BAR;

    let phys = PhysicsSnapshot {
        el_overload,
        el_temp,
        tank_pressure_bar,
    };
    let terms = reward_and_penalty(d, &phys, &state.exogenous, config);

    StepOutcome {
        reward: terms.reward,
        cost: terms.cost,
        penalty: terms.penalty,
        violations: terms.violations,
        decoded: *d,
        next_state: SystemState {
            exogenous: next_exo,
            s_ess,
            s_tes,
            s_ces,
            s_hss,
            el_temp,
            el_overload,
            tank_temp,
        },
        el_current,
        tank_pressure_bar,
    }
}

/// Decode `a` in `state` and advance to the slot described by `next_exo`.
pub fn step(
    state: &SystemState,
    a: &Action,
    next_exo: ExogenousRecord,
    config: &EnvConfig,
) -> StepOutcome {
    let d = decode_action(state, a, config);
    advance(state, &d, next_exo, config)
}

/// One episode over a single day of exogenous records.
#[derive(Debug, Clone)]
pub struct HmesEnv {
    config: EnvConfig,
    day: Vec<ExogenousRecord>,
    t: usize,
    state: SystemState,
}

impl HmesEnv {
    pub fn new(config: EnvConfig, day: &[ExogenousRecord]) -> Result<Self, EnvError> {
        let state = reset(day, &config)?;
        Ok(Self {
            config,
            day: day[..config.horizon].to_vec(),
            t: 0,
            state,
        })
    }

    pub fn reset(&mut self, day: &[ExogenousRecord]) -> Result<SystemState, EnvError> {
        self.state = reset(day, &self.config)?;
        self.day = day[..self.config.horizon].to_vec();
        self.t = 0;
        Ok(self.state)
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    /// Slot index of the current state.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn is_done(&self) -> bool {
        self.t >= self.config.horizon
    }

    /// Advance one slot. The returned flag is true on the final slot.
    pub fn step(&mut self, a: &Action) -> Result<(StepOutcome, bool), EnvError> {
        if self.is_done() {
            return Err(EnvError::EpisodeDone);
        }
        let next_exo = self.day[(self.t + 1).min(self.config.horizon - 1)];
        let out = step(&self.state, a, next_exo, &self.config);
        self.state = out.next_state;
        self.t += 1;
        Ok((out, self.is_done()))
    }
}
