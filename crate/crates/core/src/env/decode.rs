//! Action decoding: normalised action → feasible device setpoints.
//!
//! The decoder walks the device chain in a fixed order. Storage clips come
//! first, then the cooling and heat balances pin the chiller and fuel cell,
//! the hydrogen balance pins the electrolyzer, and the grid closes the
//! electricity balance. Infeasible derived setpoints are clamped; the
//! pre-clamp requests are kept so the reward can charge the hinge penalties.

use crate::devices::{
    clip_hydrogen_action, clip_storage_action, el_hydrogen_rate, el_power_for_rate, fc_from_heat,
    renewables, ElRegion, StorageFlow, SECONDS_PER_HOUR,
};

use super::{Action, DecodedAction, EnvConfig, ExogenousRecord, SystemState};

pub fn decode_action(state: &SystemState, a: &Action, config: &EnvConfig) -> DecodedAction {
    let dev = &config.devices;
    let dt = config.dt;
    let exo = &state.exogenous;
    let a = a.clamped();

    let (p_solar, g_solar) = renewables(exo.q_rad, &dev.conversion);

    let requested_buy = a.buy() * dev.tank.v_buy_max;
    let ess = clip_storage_action(a.ess(), state.s_ess, &dev.ess, dt);
    let tes = clip_storage_action(a.tes(), state.s_tes, &dev.tes, dt);
    let ces = clip_storage_action(a.ces(), state.s_ces, &dev.ces, dt);
    let hss = clip_hydrogen_action(a.hss(), state.s_hss, requested_buy * dt, &dev.hss, dt);

    // Cooling balance: the chiller covers storage charging plus demand.
    let q_ac_req = ces.net() + exo.demand_c;
    let (q_ac, cool_dump) = if q_ac_req < 0.0 {
        (0.0, -q_ac_req)
    } else {
        (q_ac_req, 0.0)
    };
    let g_ac = q_ac / dev.conversion.eta_ac;

    // Heat balance: the fuel cell covers whatever solar heat does not.
    let g_fc_req = tes.net() + g_ac + exo.demand_h - g_solar;
    let (g_fc_req, heat_dump) = if g_fc_req < 0.0 {
        (0.0, -g_fc_req)
    } else {
        (g_fc_req, 0.0)
    };
    let fc = fc_from_heat(g_fc_req, &dev.fuel_cell);
    let g_fc = fc.output.heat;
    let heat_unserved = if fc.clipped { g_fc_req - g_fc } else { 0.0 };
    let v_fc = fc.output.hydrogen;

    // Hydrogen balance: net tank flow = alpha·v_ely − v_fc + v_buy.
    let alpha = dev.electrolyzer.alpha;
    let mut net_tank = hss.net();
    let mut v_buy = requested_buy;
    let mut v_ely_req = (net_tank + v_fc - v_buy) / alpha;
    if v_ely_req < 0.0 {
        // Over-purchase: sell the surplus back.
        v_buy = net_tank + v_fc;
        v_ely_req = 0.0;
    }

    let sol = el_power_for_rate(v_ely_req / SECONDS_PER_HOUR, state.el_temp, &dev.electrolyzer);
    let v_ely = match sol.region {
        ElRegion::Off | ElRegion::BelowMin => 0.0,
        ElRegion::Feasible => v_ely_req,
        ElRegion::AboveMax => {
            el_hydrogen_rate(sol.power, state.el_temp, &dev.electrolyzer) * SECONDS_PER_HOUR
        }
    };
    let mut h2_makeup = 0.0;
    if v_ely < v_ely_req {
        // Shortfall comes out of the tank first, then from the market.
        net_tank -= alpha * (v_ely_req - v_ely);
        let floor = (dev.hss.s_min - state.s_hss) / dt;
        if net_tank < floor {
            h2_makeup = floor - net_tank;
            net_tank = floor;
            v_buy += h2_makeup;
        }
    }
    let hss = if net_tank >= 0.0 {
        StorageFlow {
            ch: net_tank,
            dis: 0.0,
        }
    } else {
        StorageFlow {
            ch: 0.0,
            dis: net_tank,
        }
    };

    let p_ely = sol.power;
    let p_grid = ess.net() + p_ely + exo.demand_e - p_solar - fc.power;

    DecodedAction {
        ess,
        tes,
        ces,
        hss,
        v_buy,
        h2_makeup,
        v_ely,
        v_fc,
        p_ely,
        p_ely_requested: sol.requested,
        el_region: sol.region,
        p_fc: fc.power,
        p_fc_requested: fc.requested,
        fc_clipped: fc.clipped,
        i_fc: fc.output.current,
        g_fc,
        g_ac,
        q_ac,
        p_grid,
        p_solar,
        g_solar,
        heat_dump,
        heat_unserved,
        cool_dump,
    }
}

/// Signed residuals of the electricity, heat, cooling and hydrogen balances.
///
/// Curtailment and unserved heat enter as explicit terms, so a decoded
/// action yields zeros up to rounding.
pub fn balance_residuals(
    d: &DecodedAction,
    exo: &ExogenousRecord,
    config: &EnvConfig,
) -> [f64; 4] {
    let alpha = config.devices.electrolyzer.alpha;
    let r_e = d.p_grid + d.p_solar + d.p_fc - (d.ess.net() + d.p_ely + exo.demand_e);
    let r_h = d.g_solar + d.g_fc + d.heat_unserved
        - (d.tes.net() + d.g_ac + exo.demand_h + d.heat_dump);
    let r_c = d.q_ac - (d.ces.net() + exo.demand_c + d.cool_dump);
    let r_h2 = d.hss.net() - (alpha * d.v_ely - d.v_fc + d.v_buy);
    [r_e, r_h, r_c, r_h2]
}
