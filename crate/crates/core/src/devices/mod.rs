//! Stateless device equations of the plant.
//!
//! Every function here is pure. Electrolyzer hydrogen rates are in m³/s so
//! the curve constants stay in their native units; the environment converts
//! to hourly balances with [`SECONDS_PER_HOUR`]. Hydrogen stock is in Nm³.

mod conversion;
mod electrolyzer;
mod fuel_cell;
mod params;
mod storage;
mod tank;

pub use conversion::{ac_convert, renewables};
pub use electrolyzer::{
    el_hydrogen_rate, el_overload_step, el_power_for_rate, el_stack_current, el_stack_power,
    el_temperature_step, ElPowerSolution, ElRegion,
};
pub use fuel_cell::{fc_current, fc_forward, fc_from_heat, FcDispatch, FcOutput};
pub use params::{
    ConversionParams, DeviceParams, ElectrolyzerParams, FuelCellParams, StorageParams,
    TankParams, H2_DENSITY, PA_PER_BAR, SECONDS_PER_HOUR,
};
pub use storage::{clip, clip_hydrogen_action, clip_storage_action, storage_step, StorageFlow};
pub use tank::{tank_pressure, tank_step, tank_temperature_step, tank_thermo, TankThermo};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DeviceError {
    #[error("device contract violated: {0}")]
    Contract(String),
}

