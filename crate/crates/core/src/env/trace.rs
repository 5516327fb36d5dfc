use std::io::Write;

use serde::Serialize;

use super::{Action, StepOutcome, SystemState};

/// Column order of per-step trace files.
pub const TRACE_COLUMNS: &[&str] = &[
    "day_index", "t", "day", "hour",
    "s_ess", "s_tes", "s_ces", "s_hss", "el_temp", "el_overload", "tank_temp",
    "a_ess", "a_tes", "a_ces", "a_hss", "a_buy",
    "ess_ch", "ess_dis", "tes_ch", "tes_dis", "ces_ch", "ces_dis", "hss_ch", "hss_dis",
    "v_buy", "h2_makeup", "v_ely", "v_fc", "p_ely", "p_fc", "i_fc", "g_fc", "g_ac", "q_ac",
    "p_grid", "p_solar", "g_solar", "heat_dump", "heat_unserved", "cool_dump",
    "el_current", "tank_pressure_bar",
    "cost", "penalty", "reward",
    "pen_overload", "pen_el_temp", "pen_pressure_low", "pen_pressure_high",
    "pen_fc_low", "pen_fc_high", "pen_el_low", "pen_el_high", "pen_ac",
];

/// One row of a step trace: the state the action was taken in, the action,
/// its decoded setpoints and the resulting cost terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub day_index: usize,
    pub t: usize,
    pub day: u32,
    pub hour: u32,
    pub s_ess: f64,
    pub s_tes: f64,
    pub s_ces: f64,
    pub s_hss: f64,
    pub el_temp: f64,
    pub el_overload: f64,
    pub tank_temp: f64,
    pub a_ess: f64,
    pub a_tes: f64,
    pub a_ces: f64,
    pub a_hss: f64,
    pub a_buy: f64,
    pub ess_ch: f64,
    pub ess_dis: f64,
    pub tes_ch: f64,
    pub tes_dis: f64,
    pub ces_ch: f64,
    pub ces_dis: f64,
    pub hss_ch: f64,
    pub hss_dis: f64,
    pub v_buy: f64,
    pub h2_makeup: f64,
    pub v_ely: f64,
    pub v_fc: f64,
    pub p_ely: f64,
    pub p_fc: f64,
    pub i_fc: f64,
    pub g_fc: f64,
    pub g_ac: f64,
    pub q_ac: f64,
    pub p_grid: f64,
    pub p_solar: f64,
    pub g_solar: f64,
    pub heat_dump: f64,
    pub heat_unserved: f64,
    pub cool_dump: f64,
    pub el_current: f64,
    pub tank_pressure_bar: f64,
    pub cost: f64,
    pub penalty: f64,
    pub reward: f64,
    pub pen_overload: f64,
    pub pen_el_temp: f64,
    pub pen_pressure_low: f64,
    pub pen_pressure_high: f64,
    pub pen_fc_low: f64,
    pub pen_fc_high: f64,
    pub pen_el_low: f64,
    pub pen_el_high: f64,
    pub pen_ac: f64,
}

impl TraceRow {
    pub fn new(
        day_index: usize,
        t: usize,
        state: &SystemState,
        a: &Action,
        out: &StepOutcome,
    ) -> Self {
        let d = &out.decoded;
        let v = &out.violations;
        let a = a.clamped();
        Self {
            day_index,
            t,
            day: state.exogenous.day,
            hour: state.exogenous.hour,
            s_ess: state.s_ess,
            s_tes: state.s_tes,
            s_ces: state.s_ces,
            s_hss: state.s_hss,
            el_temp: state.el_temp,
            el_overload: state.el_overload,
            tank_temp: state.tank_temp,
            a_ess: a.ess(),
            a_tes: a.tes(),
            a_ces: a.ces(),
            a_hss: a.hss(),
            a_buy: a.buy(),
            ess_ch: d.ess.ch,
            ess_dis: d.ess.dis,
            tes_ch: d.tes.ch,
            tes_dis: d.tes.dis,
            ces_ch: d.ces.ch,
            ces_dis: d.ces.dis,
            hss_ch: d.hss.ch,
            hss_dis: d.hss.dis,
            v_buy: d.v_buy,
            h2_makeup: d.h2_makeup,
            v_ely: d.v_ely,
            v_fc: d.v_fc,
            p_ely: d.p_ely,
            p_fc: d.p_fc,
            i_fc: d.i_fc,
            g_fc: d.g_fc,
            g_ac: d.g_ac,
            q_ac: d.q_ac,
            p_grid: d.p_grid,
            p_solar: d.p_solar,
            g_solar: d.g_solar,
            heat_dump: d.heat_dump,
            heat_unserved: d.heat_unserved,
            cool_dump: d.cool_dump,
            el_current: out.el_current,
            tank_pressure_bar: out.tank_pressure_bar,
            cost: out.cost,
            penalty: out.penalty,
            reward: out.reward,
            pen_overload: v.overload,
            pen_el_temp: v.el_temp,
            pen_pressure_low: v.tank_pressure_low,
            pen_pressure_high: v.tank_pressure_high,
            pen_fc_low: v.fc_power_low,
            pen_fc_high: v.fc_power_high,
            pen_el_low: v.el_power_low,
            pen_el_high: v.el_power_high,
            pen_ac: v.ac_overload,
        }
    }
}

/// Write trace rows as comma-separated text with a header line.
pub fn write_trace<W: Write>(w: W, rows: &[TraceRow]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    if rows.is_empty() {
        wtr.write_record(TRACE_COLUMNS)?;
    }
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{reset, step, EnvConfig, ExogenousRecord};

    #[test]
    fn header_matches_documented_columns() {
        let cfg = EnvConfig::default();
        let day: Vec<_> = (1..=24).map(|h| ExogenousRecord::quiet(1, h)).collect();
        let s = reset(&day, &cfg).unwrap();
        let a = Action::default();
        let out = step(&s, &a, day[1], &cfg);
        let mut buf = Vec::new();
        write_trace(&mut buf, &[TraceRow::new(0, 0, &s, &a, &out)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header, TRACE_COLUMNS.join(","));

        let mut empty = Vec::new();
        write_trace(&mut empty, &[]).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim(), TRACE_COLUMNS.join(","));
    }
}
