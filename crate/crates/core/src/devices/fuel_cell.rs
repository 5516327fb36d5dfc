use super::FuelCellParams;

/// Fuel-cell operating point derived from its DC output.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FcOutput {
    pub current: f64,
    /// Hydrogen draw, Nm³/h.
    pub hydrogen: f64,
    /// Recovered heat, kW.
    pub heat: f64,
}

/// Stack current for DC power `p_fc`: two affine segments joined at the
/// breakpoint, zero outside `(p_min, p_max]`.
pub fn fc_current(p_fc: f64, p: &FuelCellParams) -> f64 {
    if p_fc > p.p_min && p_fc <= p.p_bp {
        p.s1 * p_fc
    } else if p_fc > p.p_bp && p_fc <= p.p_max {
        p.s2 * (p_fc - p.p_bp) + p.i_bp
    } else {
        0.0
    }
}

pub fn fc_forward(p_fc: f64, p: &FuelCellParams) -> FcOutput {
    let current = fc_current(p_fc, p);
    FcOutput {
        current,
        hydrogen: p.c * current,
        heat: p.heat_ratio() * p_fc,
    }
}

/// Fuel-cell dispatch needed to recover `g_fc` kW of heat.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FcDispatch {
    /// DC power before clamping to `p_max`.
    pub requested: f64,
    pub power: f64,
    pub output: FcOutput,
    pub clipped: bool,
}

pub fn fc_from_heat(g_fc: f64, p: &FuelCellParams) -> FcDispatch {
    let requested = g_fc.max(0.0) / p.heat_ratio();
    let clipped = requested > p.p_max;
    let power = if clipped { p.p_max } else { requested };
    FcDispatch {
        requested,
        power,
        output: fc_forward(power, p),
        clipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_examples() {
        let p = FuelCellParams::default();
        let bp = fc_forward(47.97, &p);
        assert!((bp.current - 122.8032).abs() < 1e-9);
        assert!((bp.current - p.i_bp).abs() <= 0.01);

        let o = fc_forward(100.0, &p);
        assert!((o.current - 295.0193).abs() < 1e-9);
        assert!((o.heat - 186.666_666_666_666_7).abs() < 1e-9);
        assert!((o.hydrogen - 0.21 * 295.0193).abs() < 1e-9);

        assert_eq!(fc_forward(0.0, &p), FcOutput::default());
    }

    #[test]
    fn hydrogen_linear_in_current() {
        let p = FuelCellParams::default();
        for pw in [10.0, 47.97, 80.0, 160.0] {
            let o = fc_forward(pw, &p);
            assert!((o.hydrogen / o.current - p.c).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_inversion() {
        let p = FuelCellParams::default();
        assert_eq!(fc_from_heat(0.0, &p).power, 0.0);
        let d = fc_from_heat(186.666_666_666_666_7, &p);
        assert!((d.power - 100.0).abs() < 1e-9);
        assert!(!d.clipped);
        let d = fc_from_heat(400.0, &p);
        assert!(d.clipped);
        assert_eq!(d.power, 160.0);
        assert!((d.requested - 214.2857).abs() < 1e-3);
    }
}
