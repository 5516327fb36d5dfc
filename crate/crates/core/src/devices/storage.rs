use super::{DeviceError, StorageParams};

/// `min(max(x, lo), hi)`; `hi` wins when the interval is empty.
#[inline]
pub fn clip(x: f64, lo: f64, hi: f64) -> f64 {
    x.max(lo).min(hi)
}

/// Charging (≥ 0) and discharging (≤ 0) setpoints of one storage device.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StorageFlow {
    pub ch: f64,
    pub dis: f64,
}

impl StorageFlow {
    pub fn net(&self) -> f64 {
        self.ch + self.dis
    }
}

/// One-slot level update `level + (ch·η_ch + dis/η_dis)·dt`.
pub fn storage_step(
    level: f64,
    ch: f64,
    dis: f64,
    p: &StorageParams,
    dt: f64,
) -> Result<f64, DeviceError> {
    if ch < 0.0 || dis > 0.0 {
        return Err(DeviceError::Contract(format!(
            "storage flows have wrong sign (ch={ch}, dis={dis})"
        )));
    }
    if ch != 0.0 && dis != 0.0 {
        return Err(DeviceError::Contract(format!(
            "simultaneous charge {ch} and discharge {dis}"
        )));
    }
    Ok(level + (ch * p.eta_ch + dis / p.eta_dis) * dt)
}

/// Decode a normalised storage action into feasible setpoints.
///
/// A non-negative action charges up to the remaining headroom, a negative
/// one discharges down to `s_min`. Exactly one of the two flows is nonzero.
pub fn clip_storage_action(a: f64, level: f64, p: &StorageParams, dt: f64) -> StorageFlow {
    if a >= 0.0 {
        let headroom = ((p.s_max - level) / (p.eta_ch * dt)).max(0.0);
        StorageFlow {
            ch: clip(a * p.ch_max, 0.0, headroom),
            dis: 0.0,
        }
    } else {
        let floor = ((p.s_min - level) * p.eta_dis / dt).min(0.0);
        StorageFlow {
            ch: 0.0,
            dis: clip(a * p.dis_max, floor, 0.0),
        }
    }
}

/// Hydrogen-tank variant of [`clip_storage_action`].
///
/// The market trade `v_buy` is taken out of the headroom as well. The
/// resulting interval is intersected with the plain level bounds so the
/// tank never leaves `[s_min, s_max]` whatever the sign of `v_buy`.
pub fn clip_hydrogen_action(
    a: f64,
    level: f64,
    v_buy: f64,
    p: &StorageParams,
    dt: f64,
) -> StorageFlow {
    if a >= 0.0 {
        let headroom = ((p.s_max - level - v_buy).min(p.s_max - level) / dt).max(0.0);
        StorageFlow {
            ch: clip(a * p.ch_max, 0.0, headroom),
            dis: 0.0,
        }
    } else {
        let floor = ((p.s_min - level - v_buy).max(p.s_min - level) / dt).min(0.0);
        StorageFlow {
            ch: 0.0,
            dis: clip(a * p.dis_max, floor, 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn battery() -> StorageParams {
        StorageParams::battery()
    }

    #[test]
    fn idle_is_identity() {
        assert_eq!(storage_step(5.0, 0.0, 0.0, &battery(), 1.0).unwrap(), 5.0);
    }

    #[test]
    fn charge_and_discharge_examples() {
        let p = battery();
        let up = storage_step(5.0, 10.0, 0.0, &p, 1.0).unwrap();
        assert!((up - 14.5).abs() < 1e-12);
        let down = storage_step(14.5, 0.0, -9.5, &p, 1.0).unwrap();
        assert!((down - 4.5).abs() < 1e-12);
    }

    #[test]
    fn simultaneous_flows_rejected() {
        assert!(storage_step(5.0, 1.0, -1.0, &battery(), 1.0).is_err());
        assert!(storage_step(5.0, -1.0, 0.0, &battery(), 1.0).is_err());
    }

    #[test]
    fn clip_examples() {
        let p = battery();
        assert_eq!(clip_storage_action(0.0, 5.0, &p, 1.0), StorageFlow::default());
        let full = clip_storage_action(1.0, p.s_max, &p, 1.0);
        assert_eq!(full.ch, 0.0);
        assert_eq!(full.dis, 0.0);
        let f = clip_storage_action(-1.0, 5.0, &p, 1.0);
        assert!((f.dis + 4.75).abs() < 1e-12);
        assert_eq!(f.ch, 0.0);
    }

    #[test]
    fn hydrogen_clip_respects_bounds_when_selling() {
        let p = StorageParams::hydrogen();
        let level = p.s_max - 5.0;
        let f = clip_hydrogen_action(1.0, level, -30.0, &p, 1.0);
        assert!(level + f.ch <= p.s_max + 1e-12);
        let f = clip_hydrogen_action(-1.0, 3.0, 20.0, &p, 1.0);
        assert!(3.0 + f.dis >= p.s_min - 1e-12);
    }

    proptest! {
        #[test]
        fn clipped_step_stays_in_bounds(a in -1.0f64..=1.0, frac in 0.0f64..=1.0, which in 0usize..4) {
            let p = [
                StorageParams::battery(),
                StorageParams::hot_water(),
                StorageParams::chilled_water(),
                StorageParams::hydrogen(),
            ][which];
            let level = p.s_min + frac * (p.s_max - p.s_min);
            let f = clip_storage_action(a, level, &p, 1.0);
            prop_assert!(f.ch * f.dis == 0.0);
            let next = storage_step(level, f.ch, f.dis, &p, 1.0).unwrap();
            prop_assert!(next >= p.s_min - 1e-9 && next <= p.s_max + 1e-9);
        }
    }
}
