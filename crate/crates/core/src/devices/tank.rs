use super::{TankParams, PA_PER_BAR};

/// Hydrogen stock update in Nm³. Only a fraction `alpha` of the
/// electrolyzer output reaches the tank.
pub fn tank_step(s_prev: f64, v_ely: f64, v_fc: f64, v_buy: f64, alpha: f64, dt: f64) -> f64 {
    s_prev + (alpha * v_ely - v_fc + v_buy) * dt
}

/// Tank temperature and pressure after one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TankThermo {
    pub temp: f64,
    /// Pa.
    pub pressure: f64,
}

impl TankThermo {
    pub fn pressure_bar(&self) -> f64 {
        self.pressure / PA_PER_BAR
    }
}

pub fn tank_temperature_step(t_tank_prev: f64, t_amb: f64, p: &TankParams) -> f64 {
    p.g0 * t_tank_prev + p.g1 * t_amb
}

/// Ideal-gas pressure (Pa) of `s` Nm³ at tank temperature `t_tank`.
pub fn tank_pressure(t_tank: f64, s: f64, p: &TankParams) -> f64 {
    (p.b0 + p.b1 * t_tank) * s * p.rho0 / p.volume
}

pub fn tank_thermo(t_tank_prev: f64, t_amb: f64, s: f64, p: &TankParams) -> TankThermo {
    let temp = tank_temperature_step(t_tank_prev, t_amb, p);
    TankThermo {
        temp,
        pressure: tank_pressure(temp, s, p),
    }
}
