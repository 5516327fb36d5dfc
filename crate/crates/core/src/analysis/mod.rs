//! Representation geometry and evaluation reports: first-layer actor
//! activations, principal components, k-means with silhouette selection and
//! the method comparison tables.

mod cluster;
mod pca;
mod report;

pub use cluster::{kmeans, select_k, silhouette, ClusterModel, KScore};
pub use pca::{alignment, covariance, jacobi_eigen, pca_fit, standardize, PcaModel};
pub use report::{
    build_report, evaluate_method, ComparisonReport, DayRow, MethodEvaluation, MethodRow, SocRow,
};

use std::io::Write;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{normalize_observation, ScenarioSet};
use crate::env::{EnvConfig, HmesEnv};
use crate::rl::{Agent, RlError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("need at least 2 samples and 1 dimension, got {rows}x{cols}")]
    TooFewSamples { rows: usize, cols: usize },
    #[error("cannot form {k} clusters from {samples} samples")]
    ClusterCount { k: usize, samples: usize },
    #[error("method {method} covers different days than {reference}")]
    DayMismatch { method: String, reference: String },
    #[error("no scenario days to roll out")]
    NoDays,
    #[error(transparent)]
    Rl(#[from] RlError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Record the actor's first-layer activations along greedy rollouts of
/// `set`, cycling through the days until exactly `n_samples` rows exist.
/// Rollouts are deterministic, so revisiting a day repeats its rows.
pub fn collect_activations(
    agent: &Agent,
    set: &ScenarioSet,
    n_samples: usize,
    cfg: &EnvConfig,
) -> Result<Array2<f64>, AnalysisError> {
    let width = agent.actor.layers[0].outputs();
    if n_samples == 0 {
        return Ok(Array2::zeros((0, width)));
    }
    if set.is_empty() {
        return Err(AnalysisError::NoDays);
    }
    let mut obs = Vec::new();
    'days: for day in &set.days {
        let mut env = HmesEnv::new(*cfg, day).map_err(RlError::from)?;
        loop {
            let o = normalize_observation(env.state(), &agent.obs_stats, &cfg.devices);
            obs.extend_from_slice(&o);
            if obs.len() / o.len() >= n_samples {
                break 'days;
            }
            let a = crate::env::Action::from_slice(&agent.greedy(&o).map_err(RlError::from)?);
            if env.step(&a).map_err(RlError::from)?.1 {
                break;
            }
        }
    }
    let dim = agent.obs_dim;
    let visited = obs.len() / dim;
    let first = agent
        .actor_first_layer(ArrayView2::from_shape((visited, dim), &obs).expect("row-major"))
        .map_err(RlError::from)?;
    Ok(Array2::from_shape_fn((n_samples, width), |(i, j)| first[[i % visited, j]]))
}

/// Settings for the geometry pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub n_samples: usize,
    pub k_min: usize,
    pub k_max: usize,
    /// Principal components kept for clustering and the projection table.
    pub n_components: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            k_min: 2,
            k_max: 8,
            n_components: 3,
        }
    }
}

/// Outcome of the activation geometry pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub pca: PcaModel,
    pub projected: Array2<f64>,
    pub clusters: ClusterModel,
    pub scores: Vec<KScore>,
}

/// Standardize the samples, fit principal components, project and cluster.
pub fn analyze_samples(
    samples: ArrayView2<f64>,
    cfg: &AnalysisConfig,
    seed: u64,
) -> Result<Geometry, AnalysisError> {
    let z = standardize(samples);
    let pca = pca_fit(z.view())?;
    let projected = pca.project(z.view(), cfg.n_components);
    let (clusters, scores) = select_k(projected.view(), cfg.k_min..=cfg.k_max, seed)?;
    Ok(Geometry {
        pca,
        projected,
        clusters,
        scores,
    })
}

impl Geometry {
    /// `sample,pc1,pc2,...,cluster`.
    pub fn write_projection<W: Write>(&self, w: W) -> Result<(), AnalysisError> {
        let mut out = csv::Writer::from_writer(w);
        let k = self.projected.ncols();
        let mut header = vec!["sample".to_string()];
        header.extend((1..=k).map(|i| format!("pc{i}")));
        header.push("cluster".into());
        out.write_record(&header)?;
        for (i, row) in self.projected.outer_iter().enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(row.iter().map(|v| format!("{v:?}")));
            rec.push(self.clusters.assignments[i].to_string());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// `component,eigenvalue,explained_ratio`.
    pub fn write_spectrum<W: Write>(&self, w: W) -> Result<(), AnalysisError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["component", "eigenvalue", "explained_ratio"])?;
        let ratio = self.pca.explained_ratio();
        for (i, (v, r)) in self.pca.eigenvalues.iter().zip(ratio.iter()).enumerate() {
            out.write_record([(i + 1).to_string(), format!("{v:?}"), format!("{r:?}")])?;
        }
        out.flush()?;
        Ok(())
    }

    /// `k,silhouette,inertia`.
    pub fn write_silhouette<W: Write>(&self, w: W) -> Result<(), AnalysisError> {
        let mut out = csv::Writer::from_writer(w);
        for s in &self.scores {
            out.serialize(s)?;
        }
        out.flush()?;
        Ok(())
    }
}
