use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ScenarioSet;
use crate::devices::DeviceParams;
use crate::env::SystemState;

/// Length of the observation vector.
pub const OBS_DIM: usize = 20;

/// Observation layout. The first four entries are the cyclical day and hour
/// encodings; the rest are affinely scaled fields.
pub const OBS_FIELDS: [&str; OBS_DIM] = [
    "day_sin",
    "day_cos",
    "hour_sin",
    "hour_cos",
    "price_buy",
    "price_sell",
    "price_h2",
    "q_rad",
    "t_amb",
    "demand_e",
    "demand_h",
    "demand_c",
    "s_ess",
    "s_tes",
    "s_ces",
    "s_hss",
    "el_temp",
    "el_overload",
    "tank_temp",
    "tank_pressure",
];

const CYCLIC: usize = 4;
const SCALED: usize = OBS_DIM - CYCLIC;

/// Per-field `[min, max]` ranges of the scaled observation entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObsStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

fn raw_fields(s: &SystemState, params: &DeviceParams) -> [f64; SCALED] {
    let e = &s.exogenous;
    [
        e.price_buy,
        e.price_sell,
        e.price_h2,
        e.q_rad,
        e.t_amb,
        e.demand_e,
        e.demand_h,
        e.demand_c,
        s.s_ess,
        s.s_tes,
        s.s_ces,
        s.s_hss,
        s.el_temp,
        s.el_overload,
        s.tank_temp,
        s.tank_pressure_bar(params),
    ]
}

impl ObsStats {
    /// Exogenous ranges from the given (training) days, plant ranges from
    /// physical limits. The tank temperature follows ambient, so it shares
    /// the ambient range widened to include the initial temperature.
    pub fn fit(train: &ScenarioSet, params: &DeviceParams) -> Self {
        let mut min = [f64::INFINITY; 8];
        let mut max = [f64::NEG_INFINITY; 8];
        for r in train.days.iter().flatten() {
            let v = [
                r.price_buy,
                r.price_sell,
                r.price_h2,
                r.q_rad,
                r.t_amb,
                r.demand_e,
                r.demand_h,
                r.demand_c,
            ];
            for k in 0..8 {
                min[k] = min[k].min(v[k]);
                max[k] = max[k].max(v[k]);
            }
        }
        if train.days.is_empty() {
            min = [0.0; 8];
            max = [0.0; 8];
        }
        let el = &params.electrolyzer;
        let t_lo = min[4].min(params.tank.t_init);
        let t_hi = max[4].max(params.tank.t_init);
        let mut lo = min.to_vec();
        let mut hi = max.to_vec();
        for (a, b) in [
            (params.ess.s_min, params.ess.s_max),
            (params.tes.s_min, params.tes.s_max),
            (params.ces.s_min, params.ces.s_max),
            (params.hss.s_min, params.hss.s_max),
            (el.t_init.min(t_lo), el.t_max),
            (0.0, el.c_max),
            (t_lo, t_hi),
            (params.tank.p_min, params.tank.p_max),
        ] {
            lo.push(a);
            hi.push(b);
        }
        Self { min: lo, max: hi }
    }

    pub fn is_complete(&self) -> bool {
        self.min.len() == SCALED && self.max.len() == SCALED
    }
}

/// Affine map of `x` from `[lo, hi]` to `[-1, 1]`; degenerate ranges map to 0.
pub fn scale(x: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        2.0 * (x - lo) / (hi - lo) - 1.0
    } else {
        0.0
    }
}

/// Inverse of [`scale`] for a non-degenerate range.
pub fn unscale(y: f64, lo: f64, hi: f64) -> f64 {
    lo + (y + 1.0) * (hi - lo) / 2.0
}

/// `(sin, cos)` of `2π·k/period`.
pub fn cyclic(k: u32, period: u32) -> (f64, f64) {
    let angle = 2.0 * PI * k as f64 / period as f64;
    (angle.sin(), angle.cos())
}

/// Dimensionless observation of `state` in the [`OBS_FIELDS`] layout.
///
/// Values inside the stats ranges land in `[-1, 1]`; values outside are
/// extrapolated rather than clamped.
pub fn normalize_observation(
    state: &SystemState,
    stats: &ObsStats,
    params: &DeviceParams,
) -> [f64; OBS_DIM] {
    assert!(stats.is_complete(), "observation stats cover {} fields", stats.min.len());
    let mut out = [0.0; OBS_DIM];
    let (ds, dc) = cyclic(state.exogenous.day, 7);
    let (hs, hc) = cyclic(state.exogenous.hour, 24);
    out[..CYCLIC].copy_from_slice(&[ds, dc, hs, hc]);
    for (k, x) in raw_fields(state, params).into_iter().enumerate() {
        out[CYCLIC + k] = scale(x, stats.min[k], stats.max[k]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, GeneratorConfig};
    use crate::env::ExogenousRecord;
    use proptest::prelude::*;

    #[test]
    fn hour_six_is_quarter_turn() {
        let (s, c) = cyclic(6, 24);
        assert!((s - 1.0).abs() < 1e-15);
        assert!(c.abs() < 1e-15);
    }

    #[test]
    fn endpoints_map_to_unit_bounds() {
        assert_eq!(scale(3.0, 3.0, 7.0), -1.0);
        assert_eq!(scale(7.0, 3.0, 7.0), 1.0);
        assert_eq!(scale(5.0, 4.0, 4.0), 0.0);
    }

    #[test]
    fn observation_layout() {
        let params = DeviceParams::default();
        let set = generate_synthetic(&GeneratorConfig::default(), 3).unwrap();
        let stats = ObsStats::fit(&set, &params);
        assert!(stats.is_complete());
        let s = SystemState::initial(set.days[0][0], &params);
        let obs = normalize_observation(&s, &stats, &params);
        assert_eq!(obs.len(), OBS_DIM);
        // Initial ESS at 5 of [0, 50].
        assert!((obs[12] - (-0.8)).abs() < 1e-12);
        // CES starts at its minimum, overload at zero.
        assert_eq!(obs[14], -1.0);
        assert_eq!(obs[17], -1.0);
        for x in obs {
            assert!((-1.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn degenerate_field_maps_to_zero() {
        let params = DeviceParams::default();
        let set = generate_synthetic(&GeneratorConfig::default(), 2).unwrap();
        let stats = ObsStats::fit(&set, &params);
        // price_h2 is constant in the default generator.
        let s = SystemState::initial(ExogenousRecord::quiet(1, 1), &params);
        assert_eq!(normalize_observation(&s, &stats, &params)[6], 0.0);
    }

    proptest! {
        #[test]
        fn scale_is_monotone_and_invertible(
            lo in -100.0..100.0f64, w in 0.1..100.0f64, a in 0.0..1.0f64, b in 0.0..1.0f64
        ) {
            let hi = lo + w;
            let (x, y) = (lo + a * w, lo + b * w);
            if x < y {
                prop_assert!(scale(x, lo, hi) <= scale(y, lo, hi));
            }
            prop_assert!((unscale(scale(x, lo, hi), lo, hi) - x).abs() < 1e-9 * (1.0 + x.abs()));
        }
    }
}
