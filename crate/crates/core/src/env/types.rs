use serde::{Deserialize, Serialize};

use crate::devices::{DeviceParams, ElRegion, StorageFlow};

/// Exogenous inputs of one hourly slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExogenousRecord {
    /// Day of week, 1..=7.
    pub day: u32,
    /// Hour of day, 1..=24.
    pub hour: u32,
    pub price_buy: f64,
    pub price_sell: f64,
    pub price_h2: f64,
    pub q_rad: f64,
    pub t_amb: f64,
    pub demand_e: f64,
    pub demand_h: f64,
    pub demand_c: f64,
}

impl ExogenousRecord {
    /// Checks the record invariants; the message names the offending field.
    pub fn validate(&self) -> Result<(), String> {
        if !(1..=7).contains(&self.day) {
            return Err(format!("day {} outside 1..=7", self.day));
        }
        if !(1..=24).contains(&self.hour) {
            return Err(format!("hour {} outside 1..=24", self.hour));
        }
        let finite = [
            ("price_buy", self.price_buy),
            ("price_sell", self.price_sell),
            ("price_h2", self.price_h2),
            ("q_rad", self.q_rad),
            ("t_amb", self.t_amb),
            ("demand_e", self.demand_e),
            ("demand_h", self.demand_h),
            ("demand_c", self.demand_c),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(format!("{name} is not finite"));
            }
        }
        if self.price_sell < 0.0 {
            return Err("price_sell must be non-negative".into());
        }
        if self.price_buy < self.price_sell {
            return Err("price_buy must not be below price_sell".into());
        }
        for (name, v) in [
            ("q_rad", self.q_rad),
            ("demand_e", self.demand_e),
            ("demand_h", self.demand_h),
            ("demand_c", self.demand_c),
        ] {
            if v < 0.0 {
                return Err(format!("{name} must be non-negative"));
            }
        }
        Ok(())
    }

    /// All-zero record (prices, weather and demands) at the given slot.
    pub fn quiet(day: u32, hour: u32) -> Self {
        Self {
            day,
            hour,
            price_buy: 0.0,
            price_sell: 0.0,
            price_h2: 0.0,
            q_rad: 0.0,
            t_amb: 0.0,
            demand_e: 0.0,
            demand_h: 0.0,
            demand_c: 0.0,
        }
    }
}

/// Observable plant and world state at one slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub exogenous: ExogenousRecord,
    pub s_ess: f64,
    pub s_tes: f64,
    pub s_ces: f64,
    /// Nm³.
    pub s_hss: f64,
    pub el_temp: f64,
    pub el_overload: f64,
    pub tank_temp: f64,
}

impl SystemState {
    pub fn initial(exogenous: ExogenousRecord, params: &DeviceParams) -> Self {
        Self {
            exogenous,
            s_ess: params.ess.s_init,
            s_tes: params.tes.s_init,
            s_ces: params.ces.s_init,
            s_hss: params.hss.s_init,
            el_temp: params.electrolyzer.t_init,
            el_overload: 0.0,
            tank_temp: params.tank.t_init,
        }
    }

    /// Tank pressure in bar, derived from stock and tank temperature.
    pub fn tank_pressure_bar(&self, params: &DeviceParams) -> f64 {
        crate::devices::tank_pressure(self.tank_temp, self.s_hss, &params.tank)
            / crate::devices::PA_PER_BAR
    }
}

pub const ACTION_DIM: usize = 5;

/// Normalised control: ESS, TES, CES, HSS charge/discharge and hydrogen trade.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Action(pub [f64; ACTION_DIM]);

impl Action {
    pub fn new(ess: f64, tes: f64, ces: f64, hss: f64, buy: f64) -> Self {
        Self([ess, tes, ces, hss, buy])
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let mut a = [0.0; ACTION_DIM];
        a.copy_from_slice(&v[..ACTION_DIM]);
        Self(a)
    }

    /// Componentwise clamp into `[-1, 1]`; NaN maps to 0.
    pub fn clamped(self) -> Self {
        Self(self.0.map(|x| if x.is_nan() { 0.0 } else { x.clamp(-1.0, 1.0) }))
    }

    pub fn ess(&self) -> f64 {
        self.0[0]
    }
    pub fn tes(&self) -> f64 {
        self.0[1]
    }
    pub fn ces(&self) -> f64 {
        self.0[2]
    }
    pub fn hss(&self) -> f64 {
        self.0[3]
    }
    pub fn buy(&self) -> f64 {
        self.0[4]
    }
}

/// Physical setpoints derived from an [`Action`] for one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodedAction {
    pub ess: StorageFlow,
    pub tes: StorageFlow,
    pub ces: StorageFlow,
    /// Net tank flow split by sign, Nm³/h.
    pub hss: StorageFlow,
    /// Net hydrogen purchase (negative = sale), Nm³/h.
    pub v_buy: f64,
    /// Hydrogen bought on top of the request to cover an electrolyzer shortfall.
    pub h2_makeup: f64,
    /// Electrolyzer output, Nm³/h.
    pub v_ely: f64,
    /// Fuel-cell draw, Nm³/h.
    pub v_fc: f64,
    pub p_ely: f64,
    pub p_ely_requested: f64,
    pub el_region: ElRegion,
    pub p_fc: f64,
    pub p_fc_requested: f64,
    pub fc_clipped: bool,
    pub i_fc: f64,
    pub g_fc: f64,
    pub g_ac: f64,
    pub q_ac: f64,
    pub p_grid: f64,
    pub p_solar: f64,
    pub g_solar: f64,
    /// Surplus heat released without use, kW.
    pub heat_dump: f64,
    /// Heat the clamped fuel cell could not deliver, kW.
    pub heat_unserved: f64,
    /// Surplus cooling released without use, kW.
    pub cool_dump: f64,
}

/// Nonnegative hinge terms of the constraint penalty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Violations {
    pub overload: f64,
    pub el_temp: f64,
    pub tank_pressure_low: f64,
    pub tank_pressure_high: f64,
    pub fc_power_low: f64,
    pub fc_power_high: f64,
    pub el_power_low: f64,
    pub el_power_high: f64,
    pub ac_overload: f64,
}

impl Violations {
    pub fn terms(&self) -> [f64; 9] {
        [
            self.overload,
            self.el_temp,
            self.tank_pressure_low,
            self.tank_pressure_high,
            self.fc_power_low,
            self.fc_power_high,
            self.el_power_low,
            self.el_power_high,
            self.ac_overload,
        ]
    }

    /// Sum of the terms, left to right.
    pub fn total(&self) -> f64 {
        self.terms().iter().fold(0.0, |acc, t| acc + t)
    }
}

/// Result of one environment transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub cost: f64,
    pub penalty: f64,
    pub violations: Violations,
    pub decoded: DecodedAction,
    pub next_state: SystemState,
    pub el_current: f64,
    pub tank_pressure_bar: f64,
}

/// Environment configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    /// Slot length, hours.
    pub dt: f64,
    /// Steps per episode.
    pub horizon: usize,
    pub lambda_penalty: f64,
    pub devices: DeviceParams,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            dt: 1.0,
            horizon: 24,
            lambda_penalty: 0.1,
            devices: DeviceParams::default(),
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt > 0.0) {
            return Err("dt must be positive".into());
        }
        if self.horizon == 0 {
            return Err("horizon must be at least 1".into());
        }
        if !(self.lambda_penalty >= 0.0) {
            return Err("lambda_penalty must be non-negative".into());
        }
        self.devices.validate()
    }
}
