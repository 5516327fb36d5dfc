use crate::devices::ElRegion;

use super::{DecodedAction, EnvConfig, ExogenousRecord, Violations};

/// Post-transition physics quantities the penalty is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsSnapshot {
    pub el_overload: f64,
    pub el_temp: f64,
    pub tank_pressure_bar: f64,
}

/// Reward, cost, penalty and its breakdown for one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardTerms {
    pub reward: f64,
    pub cost: f64,
    pub penalty: f64,
    pub violations: Violations,
}

/// Trading cost of one slot: buy price on import, sell price on export,
/// plus the hydrogen trade.
pub fn slot_cost(p_grid: f64, v_buy: f64, exo: &ExogenousRecord, dt: f64) -> f64 {
    let spread = (exo.price_buy - exo.price_sell) / 2.0;
    let mid = (exo.price_buy + exo.price_sell) / 2.0;
    (spread * p_grid.abs() + mid * p_grid + exo.price_h2 * v_buy) * dt
}

#[inline]
fn hinge(x: f64) -> f64 {
    x.max(0.0)
}

pub fn violations(d: &DecodedAction, phys: &PhysicsSnapshot, config: &EnvConfig) -> Violations {
    let dev = &config.devices;
    let el = &dev.electrolyzer;
    let fc = &dev.fuel_cell;
    let (el_power_low, el_power_high) = match d.el_region {
        ElRegion::BelowMin => (hinge(el.p_min - d.p_ely_requested), 0.0),
        ElRegion::AboveMax => (0.0, hinge(d.p_ely_requested - el.p_max)),
        ElRegion::Off | ElRegion::Feasible => (0.0, 0.0),
    };
    Violations {
        overload: hinge(phys.el_overload - el.c_max),
        el_temp: hinge(phys.el_temp - el.t_max),
        tank_pressure_low: hinge(dev.tank.p_min - phys.tank_pressure_bar),
        tank_pressure_high: hinge(phys.tank_pressure_bar - dev.tank.p_max),
        fc_power_low: hinge(fc.p_min - d.p_fc_requested),
        fc_power_high: hinge(d.p_fc_requested - fc.p_max),
        el_power_low,
        el_power_high,
        ac_overload: hinge(d.g_ac - dev.conversion.ac_g_max),
    }
}

/// `reward = −(cost + λ·penalty)`; the grouping makes
/// `reward + (cost + λ·penalty)` vanish exactly.
pub fn reward_and_penalty(
    d: &DecodedAction,
    phys: &PhysicsSnapshot,
    exo: &ExogenousRecord,
    config: &EnvConfig,
) -> RewardTerms {
    let cost = slot_cost(d.p_grid, d.v_buy, exo, config.dt);
    let violations = violations(d, phys, config);
    let penalty = violations.total();
    let reward = -(cost + config.lambda_penalty * penalty);
    RewardTerms {
        reward,
        cost,
        penalty,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{decode_action, Action, SystemState};

    fn priced(buy: f64, sell: f64) -> ExogenousRecord {
        let mut e = ExogenousRecord::quiet(1, 1);
        e.price_buy = buy;
        e.price_sell = sell;
        e
    }

    #[test]
    fn import_pays_buy_price() {
        let c = slot_cost(10.0, 0.0, &priced(0.3, 0.1), 1.0);
        assert!((c - 3.0).abs() < 1e-12);
    }

    #[test]
    fn export_earns_sell_price() {
        let c = slot_cost(-10.0, 0.0, &priced(0.3, 0.1), 1.0);
        assert!((c + 1.0).abs() < 1e-12);
    }

    #[test]
    fn overload_hinge() {
        let cfg = EnvConfig::default();
        let exo = ExogenousRecord::quiet(1, 1);
        let s = SystemState::initial(exo, &cfg.devices);
        let d = decode_action(&s, &Action::default(), &cfg);
        let phys = PhysicsSnapshot {
            el_overload: 88.134,
            el_temp: 20.0,
            tank_pressure_bar: 1.0,
        };
        let t = reward_and_penalty(&d, &phys, &exo, &cfg);
        assert_eq!(t.cost, 0.0);
        assert!((t.violations.overload - 13.134).abs() < 1e-9);
        assert!((t.reward + 1.3134).abs() < 1e-9);
        assert_eq!(t.reward + (t.cost + cfg.lambda_penalty * t.penalty), 0.0);
    }

    #[test]
    fn penalty_is_sum_of_terms() {
        let cfg = EnvConfig::default();
        let exo = ExogenousRecord::quiet(1, 1);
        let s = SystemState::initial(exo, &cfg.devices);
        let mut d = decode_action(&s, &Action::default(), &cfg);
        d.g_ac = 250.0;
        d.p_fc_requested = 170.0;
        let phys = PhysicsSnapshot {
            el_overload: 80.0,
            el_temp: 75.0,
            tank_pressure_bar: 50.0,
        };
        let t = reward_and_penalty(&d, &phys, &exo, &cfg);
        assert!((t.penalty - (5.0 + 5.0 + 5.0 + 10.0 + 50.0)).abs() < 1e-9);
        assert_eq!(t.penalty, t.violations.total());
        assert!(t.violations.terms().iter().all(|&x| x >= 0.0));
    }
}
