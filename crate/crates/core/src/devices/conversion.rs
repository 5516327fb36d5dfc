use super::ConversionParams;

/// Cooling produced by the absorption chiller from `g_ac` kW of heat.
pub fn ac_convert(g_ac: f64, p: &ConversionParams) -> f64 {
    p.eta_ac * g_ac
}

/// PV electricity and collector heat (kW) for irradiance `q_rad` kW/m².
pub fn renewables(q_rad: f64, p: &ConversionParams) -> (f64, f64) {
    (p.eta_pv * p.a_pv * q_rad, p.eta_stc * p.a_stc * q_rad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chiller() {
        let p = ConversionParams::default();
        assert_eq!(ac_convert(0.0, &p), 0.0);
        assert!((ac_convert(100.0, &p) - 94.0).abs() < 1e-12);
        assert!((ac_convert(200.0, &p) - 188.0).abs() < 1e-12);
    }

    #[test]
    fn solar() {
        let p = ConversionParams::default();
        assert_eq!(renewables(0.0, &p), (0.0, 0.0));
        let (pv, th) = renewables(0.8, &p);
        assert!((pv - 240.0).abs() < 1e-9);
        assert!((th - 243.84).abs() < 1e-9);
        let (pv2, th2) = renewables(1.6, &p);
        assert!((pv2 - 2.0 * pv).abs() < 1e-9 && (th2 - 2.0 * th).abs() < 1e-9);
    }
}
