//! Samplers shared by the integration tests.
#![allow(dead_code)]

use hmes::env::{Action, EnvConfig, ExogenousRecord, SystemState};
use rand::Rng;

/// Exogenous record with every field drawn from a wide but valid range.
pub fn random_record<R: Rng>(rng: &mut R) -> ExogenousRecord {
    let price_sell = rng.random_range(0.0..0.3);
    ExogenousRecord {
        day: rng.random_range(1..=7),
        hour: rng.random_range(1..=24),
        price_buy: price_sell + rng.random_range(0.0..0.5),
        price_sell,
        price_h2: rng.random_range(0.0..6.0),
        q_rad: rng.random_range(0.0..1000.0),
        t_amb: rng.random_range(-10.0..40.0),
        demand_e: rng.random_range(0.0..300.0),
        demand_h: rng.random_range(0.0..200.0),
        demand_c: rng.random_range(0.0..200.0),
    }
}

/// Plant state with storage levels inside their bounds and device
/// temperatures and counters anywhere in their operating range.
pub fn random_state<R: Rng>(rng: &mut R, cfg: &EnvConfig) -> SystemState {
    let d = &cfg.devices;
    let level = |rng: &mut R, p: &hmes::devices::StorageParams| rng.random_range(p.s_min..=p.s_max);
    SystemState {
        exogenous: random_record(rng),
        s_ess: level(rng, &d.ess),
        s_tes: level(rng, &d.tes),
        s_ces: level(rng, &d.ces),
        s_hss: level(rng, &d.hss),
        el_temp: rng.random_range(0.0..90.0),
        el_overload: rng.random_range(0.0..1.5 * d.electrolyzer.c_max),
        tank_temp: rng.random_range(-10.0..40.0),
    }
}

/// Action in the unit box, with a quarter of the draws saturated at a face.
pub fn random_action<R: Rng>(rng: &mut R) -> Action {
    let mut a = [0.0; 5];
    for x in &mut a {
        *x = if rng.random_bool(0.25) {
            if rng.random_bool(0.5) { 1.0 } else { -1.0 }
        } else {
            rng.random_range(-1.0..=1.0)
        };
    }
    Action(a)
}
