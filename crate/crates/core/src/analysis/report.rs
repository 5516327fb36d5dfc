use std::io::Write;

use serde::Serialize;

use super::AnalysisError;
use crate::data::ScenarioSet;
use crate::env::{EnvConfig, TraceRow};
use crate::rl::{gap, rollout, DayEval, Policy, RlError};

/// Per-day results and step traces of one method on a scenario set.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodEvaluation {
    pub name: String,
    pub days: Vec<DayEval>,
    pub traces: Vec<TraceRow>,
}

/// Roll `policy` through every day of `set`, keeping the traces.
pub fn evaluate_method<P: Policy + ?Sized>(
    name: &str,
    policy: &mut P,
    set: &ScenarioSet,
    cfg: &EnvConfig,
) -> Result<MethodEvaluation, RlError> {
    let mut days = Vec::with_capacity(set.len());
    let mut traces = Vec::with_capacity(set.len() * cfg.horizon);
    for (i, day) in set.days.iter().enumerate() {
        let (eval, trace) = rollout(policy, day, i, cfg)?;
        days.push(eval);
        traces.extend(trace);
    }
    Ok(MethodEvaluation {
        name: name.to_string(),
        days,
        traces,
    })
}

/// One line of the method comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRow {
    pub method: String,
    pub cost_plus_penalty: f64,
    pub cost: f64,
    pub penalty: f64,
    #[serde(rename = "return")]
    pub ret: f64,
    pub reference_cost: f64,
    pub gap_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DayRow {
    pub method: String,
    pub day_index: usize,
    pub cost_plus_penalty: f64,
    pub cost: f64,
    pub penalty: f64,
    #[serde(rename = "return")]
    pub ret: f64,
}

/// Storage levels at the start of every slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SocRow {
    pub method: String,
    pub day_index: usize,
    pub t: usize,
    pub s_ess: f64,
    pub s_tes: f64,
    pub s_ces: f64,
    pub s_hss: f64,
}

/// Method comparison with per-day detail and storage trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub lambda: f64,
    pub reference_cost: f64,
    pub methods: Vec<MethodRow>,
    pub days: Vec<DayRow>,
    pub soc: Vec<SocRow>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for x in xs {
        sum += x;
        n += 1;
    }
    sum / n.max(1) as f64
}

/// Aggregate per-method evaluations against a reference daily cost. All
/// methods must cover the same days.
pub fn build_report(
    evals: &[MethodEvaluation],
    reference_cost: f64,
    lambda: f64,
) -> Result<ComparisonReport, AnalysisError> {
    let day_ids = |e: &MethodEvaluation| e.days.iter().map(|d| d.day_index).collect::<Vec<_>>();
    if let Some(first) = evals.first() {
        let want = day_ids(first);
        for e in &evals[1..] {
            if day_ids(e) != want {
                return Err(AnalysisError::DayMismatch {
                    method: e.name.clone(),
                    reference: first.name.clone(),
                });
            }
        }
    }
    let mut report = ComparisonReport {
        lambda,
        reference_cost,
        methods: Vec::new(),
        days: Vec::new(),
        soc: Vec::new(),
    };
    for e in evals {
        let rows: Vec<DayRow> = e
            .days
            .iter()
            .map(|d| DayRow {
                method: e.name.clone(),
                day_index: d.day_index,
                cost_plus_penalty: d.cost + lambda * d.penalty,
                cost: d.cost,
                penalty: d.penalty,
                ret: d.ret,
            })
            .collect();
        let cost = mean(rows.iter().map(|r| r.cost));
        report.methods.push(MethodRow {
            method: e.name.clone(),
            cost_plus_penalty: mean(rows.iter().map(|r| r.cost_plus_penalty)),
            cost,
            penalty: mean(rows.iter().map(|r| r.penalty)),
            ret: mean(rows.iter().map(|r| r.ret)),
            reference_cost,
            gap_pct: gap(cost, reference_cost),
        });
        report.days.extend(rows);
        report.soc.extend(e.traces.iter().map(|t| SocRow {
            method: e.name.clone(),
            day_index: t.day_index,
            t: t.t,
            s_ess: t.s_ess,
            s_tes: t.s_tes,
            s_ces: t.s_ces,
            s_hss: t.s_hss,
        }));
    }
    Ok(report)
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<(), AnalysisError> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

impl ComparisonReport {
    pub fn write_methods<W: Write>(&self, w: W) -> Result<(), AnalysisError> {
        write_rows(w, &self.methods)
    }

    pub fn write_days<W: Write>(&self, w: W) -> Result<(), AnalysisError> {
        write_rows(w, &self.days)
    }

    pub fn write_soc<W: Write>(&self, w: W) -> Result<(), AnalysisError> {
        write_rows(w, &self.soc)
    }
}
