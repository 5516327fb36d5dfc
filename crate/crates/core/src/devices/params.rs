use serde::{Deserialize, Serialize};

/// Hydrogen density at normal conditions, kg/Nm³.
pub const H2_DENSITY: f64 = 8.99e-2;

/// Seconds per hour; converts electrolyzer rates (m³/s) to hourly balances.
pub const SECONDS_PER_HOUR: f64 = 3600.0;

/// Pascals per bar.
pub const PA_PER_BAR: f64 = 1.0e5;

/// Capacity and rate limits of a generic storage device.
///
/// The same structure describes the battery (kWh, kW), the hot and chilled
/// water tanks (kWh, kW) and the hydrogen tank (Nm³, Nm³/h).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageParams {
    pub s_min: f64,
    pub s_max: f64,
    pub ch_max: f64,
    pub dis_max: f64,
    pub eta_ch: f64,
    pub eta_dis: f64,
    pub s_init: f64,
}

impl StorageParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.s_min <= self.s_init && self.s_init <= self.s_max) {
            return Err(format!(
                "storage init {} outside [{}, {}]",
                self.s_init, self.s_min, self.s_max
            ));
        }
        if !(self.ch_max > 0.0 && self.dis_max > 0.0) {
            return Err("storage rate limits must be positive".into());
        }
        for eta in [self.eta_ch, self.eta_dis] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(format!("storage efficiency {eta} outside (0, 1]"));
            }
        }
        Ok(())
    }

    pub fn battery() -> Self {
        Self {
            s_min: 0.0,
            s_max: 50.0,
            ch_max: 20.0,
            dis_max: 20.0,
            eta_ch: 0.95,
            eta_dis: 0.95,
            s_init: 5.0,
        }
    }

    pub fn hot_water() -> Self {
        Self {
            s_min: 0.0,
            s_max: 100.0,
            ch_max: 50.0,
            dis_max: 50.0,
            eta_ch: 0.9,
            eta_dis: 0.9,
            s_init: 10.0,
        }
    }

    pub fn chilled_water() -> Self {
        Self {
            s_min: 20.0,
            s_max: 200.0,
            ch_max: 40.0,
            dis_max: 40.0,
            eta_ch: 0.9,
            eta_dis: 0.9,
            s_init: 20.0,
        }
    }

    /// Hydrogen stock in Nm³. The 50 kg capacity converts through the
    /// normal density.
    pub fn hydrogen() -> Self {
        Self {
            s_min: 0.0,
            s_max: 50.0 / H2_DENSITY,
            ch_max: 30.0,
            dis_max: 30.0,
            eta_ch: 1.0,
            eta_dis: 1.0,
            s_init: 0.0,
        }
    }
}

/// PEM electrolyzer: hydrogen-rate, thermal and stack-current curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectrolyzerParams {
    pub p_min: f64,
    pub p_max: f64,
    pub p_nom: f64,
    /// Nominal power of the first stack (a quarter of `p_nom`).
    pub p_nom_1: f64,
    pub z0: f64,
    pub z1: f64,
    pub z_low: f64,
    pub z_high: f64,
    pub j0: f64,
    pub j1: f64,
    pub j2: f64,
    /// Current offset in A.
    pub h0: f64,
    pub h1: f64,
    pub h_low: f64,
    pub h_high: f64,
    pub i_nom: f64,
    pub c_max: f64,
    pub t_max: f64,
    pub t_init: f64,
    /// Fraction of produced hydrogen surviving the compressor.
    pub alpha: f64,
}

impl Default for ElectrolyzerParams {
    fn default() -> Self {
        Self {
            p_min: 15.0,
            p_max: 200.0,
            p_nom: 100.0,
            p_nom_1: 25.0,
            z0: 1.490e-2,
            z1: 1.618e-5,
            z_low: 1.530e-4,
            z_high: 1.195e-4,
            j0: 3.958,
            j1: 0.551,
            j2: 0.430,
            h0: 235.254,
            h1: 0.673,
            h_low: 0.987,
            h_high: 9.0,
            i_nom: 300.0,
            c_max: 75.0,
            t_max: 70.0,
            t_init: 20.0,
            alpha: 0.697,
        }
    }
}

impl ElectrolyzerParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.p_min < self.p_nom && self.p_nom < self.p_max) {
            return Err("electrolyzer requires p_min < p_nom < p_max".into());
        }
        if (self.p_nom_1 - self.p_nom / 4.0).abs() > 1e-9 {
            return Err("electrolyzer stack nominal power must be p_nom / 4".into());
        }
        if !(self.z_low > 0.0 && self.z_high > 0.0) {
            return Err("electrolyzer rate slopes must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err("compressor factor alpha must lie in (0, 1]".into());
        }
        Ok(())
    }
}

/// Pressurised hydrogen tank thermodynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TankParams {
    pub volume: f64,
    pub b0: f64,
    pub b1: f64,
    pub g0: f64,
    pub g1: f64,
    pub rho0: f64,
    /// Pressure limits in bar.
    pub p_min: f64,
    pub p_max: f64,
    /// Hydrogen market trade cap, Nm³/h.
    pub v_buy_max: f64,
    pub t_init: f64,
}

impl Default for TankParams {
    fn default() -> Self {
        Self {
            volume: 10.0,
            b0: 11.5e5,
            b1: 4.16e3,
            g0: 0.94,
            g1: 5.91e-2,
            rho0: H2_DENSITY,
            p_min: 0.0,
            p_max: 45.0,
            v_buy_max: 30.0,
            t_init: 20.0,
        }
    }
}

impl TankParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.g0.abs() < 1.0) {
            return Err("tank temperature filter requires |g0| < 1".into());
        }
        if self.p_min < 0.0 || self.p_max <= self.p_min {
            return Err("tank pressure limits must satisfy 0 <= p_min < p_max".into());
        }
        if !(self.volume > 0.0 && self.rho0 > 0.0) {
            return Err("tank volume and density must be positive".into());
        }
        Ok(())
    }
}

/// PEM fuel cell with heat recovery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuelCellParams {
    pub p_min: f64,
    pub p_max: f64,
    pub p_bp: f64,
    pub i_bp: f64,
    pub s1: f64,
    pub s2: f64,
    /// Hydrogen draw per unit stack current (hourly convention).
    pub c: f64,
    pub eta_fc: f64,
    pub eta_rec: f64,
}

impl Default for FuelCellParams {
    fn default() -> Self {
        Self {
            p_min: 0.0,
            p_max: 160.0,
            p_bp: 47.97,
            i_bp: 122.80,
            s1: 2.56,
            s2: 3.31,
            c: 0.21,
            eta_fc: 0.3,
            eta_rec: 0.8,
        }
    }
}

impl FuelCellParams {
    /// Recovered heat per kW of DC output.
    pub fn heat_ratio(&self) -> f64 {
        self.eta_rec * (1.0 - self.eta_fc) / self.eta_fc
    }

    pub fn validate(&self) -> Result<(), String> {
        if (self.s1 * self.p_bp - self.i_bp).abs() > 1e-2 {
            return Err("fuel cell breakpoint pair is discontinuous".into());
        }
        if !(self.p_min <= self.p_bp && self.p_bp <= self.p_max) {
            return Err("fuel cell breakpoint outside [p_min, p_max]".into());
        }
        if !(self.eta_fc > 0.0 && self.eta_fc <= 1.0 && self.eta_rec > 0.0 && self.eta_rec <= 1.0) {
            return Err("fuel cell efficiencies must lie in (0, 1]".into());
        }
        Ok(())
    }
}

/// Absorption chiller, PV array and solar thermal collector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionParams {
    pub ac_g_max: f64,
    pub eta_ac: f64,
    pub a_pv: f64,
    pub eta_pv: f64,
    pub a_stc: f64,
    pub eta_stc: f64,
}

impl Default for ConversionParams {
    fn default() -> Self {
        Self {
            ac_g_max: 200.0,
            eta_ac: 0.94,
            a_pv: 1500.0,
            eta_pv: 0.2,
            a_stc: 400.0,
            eta_stc: 0.762,
        }
    }
}

impl ConversionParams {
    pub fn validate(&self) -> Result<(), String> {
        for eta in [self.eta_ac, self.eta_pv, self.eta_stc] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(format!("conversion efficiency {eta} outside (0, 1]"));
            }
        }
        if !(self.a_pv > 0.0 && self.a_stc > 0.0) {
            return Err("collector areas must be positive".into());
        }
        Ok(())
    }
}

/// Every device constant of the plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub ess: StorageParams,
    pub tes: StorageParams,
    pub ces: StorageParams,
    pub hss: StorageParams,
    pub electrolyzer: ElectrolyzerParams,
    pub tank: TankParams,
    pub fuel_cell: FuelCellParams,
    pub conversion: ConversionParams,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            ess: StorageParams::battery(),
            tes: StorageParams::hot_water(),
            ces: StorageParams::chilled_water(),
            hss: StorageParams::hydrogen(),
            electrolyzer: ElectrolyzerParams::default(),
            tank: TankParams::default(),
            fuel_cell: FuelCellParams::default(),
            conversion: ConversionParams::default(),
        }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<(), String> {
        for (name, s) in [
            ("ess", &self.ess),
            ("tes", &self.tes),
            ("ces", &self.ces),
            ("hss", &self.hss),
        ] {
            s.validate().map_err(|e| format!("{name}: {e}"))?;
        }
        self.electrolyzer.validate()?;
        self.tank.validate()?;
        self.fuel_cell.validate()?;
        self.conversion.validate()
    }
}
