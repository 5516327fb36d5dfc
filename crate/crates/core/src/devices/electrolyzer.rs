//! Electrolyzer curves: hydrogen output, stack thermal model, stack-1
//! power allocation, stack current and the overload counter.

use super::ElectrolyzerParams;

/// Hydrogen production rate in m³/s for DC power `p_el` at stack
/// temperature `temp`. Zero outside `(p_min, p_max]`.
pub fn el_hydrogen_rate(p_el: f64, temp: f64, p: &ElectrolyzerParams) -> f64 {
    let base = p.z1 * temp + p.z0;
    if p_el > p.p_min && p_el <= p.p_nom {
        base + p.z_low * (p_el - p.p_nom)
    } else if p_el > p.p_nom && p_el <= p.p_max {
        base + p.z_high * (p_el - p.p_nom)
    } else {
        0.0
    }
}

/// Which part of the operating envelope an inverted rate request falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElRegion {
    /// Zero request; the electrolyzer stays off.
    Off,
    Feasible,
    /// Request below the minimum stable output. The unit is switched off.
    BelowMin,
    /// Request above the maximum output. The unit runs at `p_max`.
    AboveMax,
}

/// Result of inverting the hydrogen-rate curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElPowerSolution {
    /// Power actually injected, in `{0} ∪ (p_min, p_max]`.
    pub power: f64,
    /// Power the request would need on the extended affine curve, floored at 0.
    pub requested: f64,
    /// Requested minus delivered hydrogen rate, m³/s (≥ 0).
    pub residual: f64,
    pub region: ElRegion,
}

/// Invert [`el_hydrogen_rate`] at fixed temperature.
pub fn el_power_for_rate(v: f64, temp: f64, p: &ElectrolyzerParams) -> ElPowerSolution {
    if v <= 0.0 {
        return ElPowerSolution {
            power: 0.0,
            requested: 0.0,
            residual: 0.0,
            region: ElRegion::Off,
        };
    }
    let base = p.z1 * temp + p.z0;
    let requested = if v <= base {
        p.p_nom + (v - base) / p.z_low
    } else {
        p.p_nom + (v - base) / p.z_high
    };
    if requested <= p.p_min {
        ElPowerSolution {
            power: 0.0,
            requested: requested.max(0.0),
            residual: v,
            region: ElRegion::BelowMin,
        }
    } else if requested > p.p_max {
        ElPowerSolution {
            power: p.p_max,
            requested,
            residual: v - el_hydrogen_rate(p.p_max, temp, p),
            region: ElRegion::AboveMax,
        }
    } else {
        ElPowerSolution {
            power: requested,
            requested,
            residual: 0.0,
            region: ElRegion::Feasible,
        }
    }
}

/// Next stack temperature from the previous temperature and power.
pub fn el_temperature_step(temp_prev: f64, p_prev: f64, p: &ElectrolyzerParams) -> f64 {
    p.j1 * temp_prev + p.j2 * p_prev + p.j0
}

/// Power allocated to the first stack, which saturates before the others.
pub fn el_stack_power(p_el: f64, p: &ElectrolyzerParams) -> f64 {
    let quarter = p.p_nom / 4.0;
    if p_el > p.p_min && p_el <= quarter {
        p_el
    } else if p_el > quarter && p_el <= p.p_nom {
        quarter
    } else if p_el > p.p_nom && p_el <= p.p_max {
        p_el / 4.0
    } else {
        0.0
    }
}

/// Current of the first stack, A.
pub fn el_stack_current(p_el: f64, temp: f64, p: &ElectrolyzerParams) -> f64 {
    let p1 = el_stack_power(p_el, p);
    let base = p.h1 * temp + p.h0;
    if p1 > p.p_min && p1 <= p.p_nom_1 {
        base + p.h_low * (p1 - p.p_nom_1)
    } else if p1 > p.p_nom_1 && p1 <= p.p_max {
        base + p.h_high * (p1 - p.p_nom_1)
    } else {
        0.0
    }
}

/// Overload counter in Ah; accumulates current above nominal, never negative.
pub fn el_overload_step(c_prev: f64, i: f64, p: &ElectrolyzerParams, dt: f64) -> f64 {
    (c_prev + (i - p.i_nom) * dt).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el() -> ElectrolyzerParams {
        ElectrolyzerParams::default()
    }

    #[test]
    fn rate_examples() {
        let p = el();
        assert!((el_hydrogen_rate(100.0, 60.0, &p) - 0.0158708).abs() < 1e-12);
        assert!((el_hydrogen_rate(150.0, 60.0, &p) - 0.0218458).abs() < 1e-12);
        assert_eq!(el_hydrogen_rate(10.0, 60.0, &p), 0.0);
        assert_eq!(el_hydrogen_rate(15.0, 60.0, &p), 0.0);
        assert_eq!(el_hydrogen_rate(200.5, 60.0, &p), 0.0);
    }

    #[test]
    fn inverse_examples() {
        let p = el();
        assert_eq!(el_power_for_rate(0.0, 60.0, &p).power, 0.0);
        assert!((el_power_for_rate(0.0158708, 60.0, &p).power - 100.0).abs() < 1e-6);
        assert!((el_power_for_rate(0.0218458, 60.0, &p).power - 150.0).abs() < 1e-6);
    }

    #[test]
    fn inverse_flags_out_of_range() {
        let p = el();
        let low = el_power_for_rate(1e-4, 60.0, &p);
        assert_eq!(low.region, ElRegion::BelowMin);
        assert_eq!(low.power, 0.0);
        assert_eq!(low.residual, 1e-4);
        assert!(low.requested < p.p_min);

        let high = el_power_for_rate(0.05, 60.0, &p);
        assert_eq!(high.region, ElRegion::AboveMax);
        assert_eq!(high.power, p.p_max);
        assert!(high.requested > p.p_max);
        let delivered = el_hydrogen_rate(p.p_max, 60.0, &p);
        assert!((high.residual - (0.05 - delivered)).abs() < 1e-15);
    }

    #[test]
    fn temperature_examples() {
        let p = el();
        assert!((el_temperature_step(20.0, 0.0, &p) - 14.978).abs() < 1e-9);
        assert!((el_temperature_step(20.0, 100.0, &p) - 57.978).abs() < 1e-9);
        let fixed = p.j0 / (1.0 - p.j1);
        assert!((el_temperature_step(fixed, 0.0, &p) - fixed).abs() < 1e-12);
        assert!((fixed - 8.815).abs() < 1e-3);
    }

    #[test]
    fn current_examples() {
        let p = el();
        assert_eq!(el_stack_power(100.0, &p), 25.0);
        assert_eq!(el_stack_power(150.0, &p), 37.5);
        assert!((el_stack_current(100.0, 60.0, &p) - 275.634).abs() < 1e-9);
        assert!((el_stack_current(150.0, 60.0, &p) - 388.134).abs() < 1e-9);
        assert_eq!(el_stack_current(10.0, 60.0, &p), 0.0);
    }

    #[test]
    fn overload_examples() {
        let p = el();
        assert_eq!(el_overload_step(0.0, 350.0, &p, 1.0), 50.0);
        assert_eq!(el_overload_step(10.0, 275.634, &p, 1.0), 0.0);
        assert_eq!(el_overload_step(0.0, 0.0, &p, 1.0), 0.0);
    }

    proptest! {
        #[test]
        fn rate_round_trip(p_el in 15.000001f64..=200.0, temp in 0.0f64..=100.0) {
            let p = el();
            let v = el_hydrogen_rate(p_el, temp, &p);
            let back = el_power_for_rate(v, temp, &p);
            prop_assert_eq!(back.region, ElRegion::Feasible);
            prop_assert!((back.power - p_el).abs() <= 1e-6);
        }

        #[test]
        fn overload_never_negative(c in 0.0f64..500.0, i in 0.0f64..1000.0, dt in 0.0f64..4.0) {
            prop_assert!(el_overload_step(c, i, &el(), dt) >= 0.0);
        }

        #[test]
        fn curves_continuous_at_nominal(temp in 0.0f64..=100.0) {
            let p = el();
            let below = p.z1 * temp + p.z0 + p.z_low * (p.p_nom - p.p_nom);
            let above = p.z1 * temp + p.z0 + p.z_high * (p.p_nom - p.p_nom);
            prop_assert!((below - above).abs() <= 1e-9);
            let left = el_stack_current(p.p_nom, temp, &p);
            let right = el_stack_current(p.p_nom + 1e-9, temp, &p);
            prop_assert!((left - right).abs() <= 1e-7);
        }
    }
}
