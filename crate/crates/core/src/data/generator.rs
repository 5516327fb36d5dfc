use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{DataError, ScenarioSet};
use crate::env::ExogenousRecord;

/// Day/night levels of a smooth diurnal profile. The profile reaches
/// `peak` at `peak_hour` and `base` twelve hours away.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiurnalProfile {
    pub base: f64,
    pub peak: f64,
    pub peak_hour: f64,
}

impl DiurnalProfile {
    pub fn at(&self, hour: u32) -> f64 {
        let phase = 2.0 * PI * (hour as f64 - self.peak_hour) / 24.0;
        self.base + (self.peak - self.base) * 0.5 * (1.0 + phase.cos())
    }
}

/// Standard deviations of the additive noise per channel. Radiation noise
/// is relative (cloud cover), the others are in the channel's unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseScales {
    pub price: f64,
    pub q_rad: f64,
    pub t_amb: f64,
    pub demand_e: f64,
    pub demand_h: f64,
    pub demand_c: f64,
}

impl Default for NoiseScales {
    fn default() -> Self {
        Self {
            price: 0.0,
            q_rad: 0.15,
            t_amb: 1.0,
            demand_e: 8.0,
            demand_h: 5.0,
            demand_c: 4.0,
        }
    }
}

impl NoiseScales {
    pub fn zero() -> Self {
        Self {
            price: 0.0,
            q_rad: 0.0,
            t_amb: 0.0,
            demand_e: 0.0,
            demand_h: 0.0,
            demand_c: 0.0,
        }
    }

    fn all(&self) -> [f64; 6] {
        [
            self.price,
            self.q_rad,
            self.t_amb,
            self.demand_e,
            self.demand_h,
            self.demand_c,
        ]
    }
}

/// Parameters of the synthetic profile generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Buy price outside the peak window.
    pub price_offpeak: f64,
    /// Buy price inside the peak window.
    pub price_peak: f64,
    /// First and last hour (inclusive) of the peak window.
    pub peak_hours: (u32, u32),
    /// Sell price as a fraction of the buy price.
    pub sell_ratio: f64,
    /// Hydrogen market price per Nm³.
    pub price_h2: f64,
    /// Radiation at solar noon on a clear day.
    pub q_rad_peak: f64,
    /// Sunrise and sunset hours; radiation is zero outside.
    pub daylight: (f64, f64),
    pub t_amb: DiurnalProfile,
    pub demand_e: DiurnalProfile,
    pub demand_h: DiurnalProfile,
    pub demand_c: DiurnalProfile,
    /// Demand multiplier on days 6 and 7.
    pub weekend_scale: f64,
    /// Day-of-week of the first generated day.
    pub start_day: u32,
    pub noise: NoiseScales,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            price_offpeak: 0.10,
            price_peak: 0.30,
            peak_hours: (8, 22),
            sell_ratio: 1.0,
            price_h2: 0.0,
            q_rad_peak: 0.8,
            daylight: (6.0, 18.0),
            t_amb: DiurnalProfile {
                base: 22.0,
                peak: 32.0,
                peak_hour: 15.0,
            },
            demand_e: DiurnalProfile {
                base: 50.0,
                peak: 150.0,
                peak_hour: 17.0,
            },
            demand_h: DiurnalProfile {
                base: 20.0,
                peak: 80.0,
                peak_hour: 7.0,
            },
            demand_c: DiurnalProfile {
                base: 10.0,
                peak: 60.0,
                peak_hour: 15.0,
            },
            weekend_scale: 0.8,
            start_day: 1,
            noise: NoiseScales::default(),
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: &str| Err(DataError::Generator(m.to_string()));
        if self.noise.all().iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
            return bad("noise scales must be finite and non-negative");
        }
        if !(0.0 <= self.price_offpeak && self.price_offpeak <= self.price_peak) {
            return bad("prices must satisfy 0 <= off-peak <= peak");
        }
        if !(0.0..=1.0).contains(&self.sell_ratio) {
            return bad("sell_ratio must lie in [0, 1]");
        }
        if self.q_rad_peak < 0.0 || self.daylight.0 >= self.daylight.1 {
            return bad("radiation peak must be non-negative and daylight non-empty");
        }
        if !(1..=7).contains(&self.start_day) {
            return bad("start_day must lie in 1..=7");
        }
        if self.weekend_scale < 0.0 {
            return bad("weekend_scale must be non-negative");
        }
        for p in [self.demand_e, self.demand_h, self.demand_c] {
            if p.base < 0.0 || p.peak < 0.0 {
                return bad("demand levels must be non-negative");
            }
        }
        Ok(())
    }

    fn is_peak(&self, hour: u32) -> bool {
        (self.peak_hours.0..=self.peak_hours.1).contains(&hour)
    }

    /// Clear-sky radiation: a half-sinusoid over daylight, zero at night.
    pub fn clear_sky(&self, hour: u32) -> f64 {
        let (rise, set) = self.daylight;
        let h = hour as f64;
        if h <= rise || h >= set {
            return 0.0;
        }
        self.q_rad_peak * (PI * (h - rise) / (set - rise)).sin()
    }
}

/// Deterministic synthetic scenario of `n_days` days of 24 hours.
pub fn generate_synthetic(cfg: &GeneratorConfig, n_days: usize) -> Result<ScenarioSet, DataError> {
    cfg.validate()?;
    if n_days == 0 {
        return Err(DataError::Generator("n_days must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut noise = |scale: f64| {
        if scale == 0.0 {
            0.0
        } else {
            scale * std_normal.sample(&mut rng)
        }
    };

    let mut days = Vec::with_capacity(n_days);
    for d in 0..n_days {
        let day = ((cfg.start_day - 1) as usize + d) % 7 + 1;
        let weekend = if day >= 6 { cfg.weekend_scale } else { 1.0 };
        let mut records = Vec::with_capacity(24);
        for hour in 1..=24u32 {
            let tou = if cfg.is_peak(hour) {
                cfg.price_peak
            } else {
                cfg.price_offpeak
            };
            let price_buy = (tou + noise(cfg.noise.price)).max(0.0);
            let cloud = (1.0 + noise(cfg.noise.q_rad)).clamp(0.0, 1.2);
            let q_rad = cfg.clear_sky(hour) * cloud;
            let t_amb = cfg.t_amb.at(hour) + noise(cfg.noise.t_amb);
            let demand_e = (weekend * cfg.demand_e.at(hour) + noise(cfg.noise.demand_e)).max(0.0);
            let demand_h = (weekend * cfg.demand_h.at(hour) + noise(cfg.noise.demand_h)).max(0.0);
            let demand_c = (weekend * cfg.demand_c.at(hour) + noise(cfg.noise.demand_c)).max(0.0);
            records.push(ExogenousRecord {
                day: day as u32,
                hour,
                price_buy,
                price_sell: price_buy * cfg.sell_ratio,
                price_h2: cfg.price_h2,
                q_rad,
                t_amb,
                demand_e,
                demand_h,
                demand_c,
            });
        }
        days.push(records);
    }
    let mut set = ScenarioSet::new("synthetic", days);
    set.seed = Some(cfg.seed);
    set.validate(24)?;
    Ok(set)
}
