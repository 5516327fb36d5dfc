//! State and state-action embeddings with the latent-dynamics loss.
//!
//! `z_s = Φ(s)` embeds a state and `z_sa = Ψ(z_s, a)` predicts the embedding
//! of the next state. The loss compares the prediction with `Φ(s')`, where
//! the `Φ(s')` branch is a constant: gradients reach Φ only through `Φ(s)`.

use ndarray::{concatenate, s, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Batch, EmbeddingNorm};
use crate::nn::{adam_step, Activation, AdamState, Gradients, Mlp, NnError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrModules {
    pub phi: Mlp,
    pub psi: Mlp,
    pub phi_opt: AdamState,
    pub psi_opt: AdamState,
    pub norm: EmbeddingNorm,
}

/// Embedding loss and the gradients of the online branch.
#[derive(Debug, Clone)]
pub struct EmbeddingGrads {
    pub loss: f64,
    pub phi: Gradients,
    pub psi: Gradients,
}

impl SrModules {
    /// `widths` lists hidden widths followed by the latent width; both
    /// embeddings share them.
    pub fn new<R: Rng + ?Sized>(
        obs_dim: usize,
        action_dim: usize,
        widths: &[usize],
        lr: f64,
        norm: EmbeddingNorm,
        rng: &mut R,
    ) -> Self {
        let latent = *widths.last().expect("latent width");
        let mut phi_w = vec![obs_dim];
        phi_w.extend_from_slice(widths);
        let mut psi_w = vec![latent + action_dim];
        psi_w.extend_from_slice(widths);
        let phi = Mlp::new(&phi_w, Activation::Relu, Activation::Identity, rng);
        let psi = Mlp::new(&psi_w, Activation::Relu, Activation::Identity, rng);
        Self {
            phi_opt: AdamState::new(&phi, lr),
            psi_opt: AdamState::new(&psi, lr),
            phi,
            psi,
            norm,
        }
    }

    pub fn latent(&self) -> usize {
        self.phi.output_dim()
    }

    pub fn embed_state(&self, s: ArrayView2<f64>) -> Result<Array2<f64>, NnError> {
        self.phi.predict(s)
    }

    pub fn embed_pair(&self, z_s: ArrayView2<f64>, a: ArrayView2<f64>) -> Result<Array2<f64>, NnError> {
        self.psi.predict(concatenate![Axis(1), z_s, a].view())
    }

    /// One optimiser step on Φ and Ψ; returns the loss before the step.
    pub fn update(&mut self, batch: &Batch) -> Result<(f64, bool), NnError> {
        let g = embedding_loss(&self.phi, &self.psi, &self.phi, batch, self.norm)?;
        let ok_phi = adam_step(&mut self.phi, &g.phi, &mut self.phi_opt)?;
        let ok_psi = adam_step(&mut self.psi, &g.psi, &mut self.psi_opt)?;
        Ok((g.loss, ok_phi && ok_psi))
    }
}

/// Loss with the prediction target evaluated by `phi_target` and treated
/// as a constant. Passing the online Φ here gives the training loss.
pub fn embedding_loss(
    phi: &Mlp,
    psi: &Mlp,
    phi_target: &Mlp,
    batch: &Batch,
    norm: EmbeddingNorm,
) -> Result<EmbeddingGrads, NnError> {
    let z_next = phi_target.predict(batch.s_next.view())?;
    embedding_loss_const(phi, psi, batch.s.view(), batch.a.view(), z_next.view(), norm)
}

/// Loss and online-branch gradients for a fixed prediction target.
pub fn embedding_loss_const(
    phi: &Mlp,
    psi: &Mlp,
    s: ArrayView2<f64>,
    a: ArrayView2<f64>,
    z_next: ArrayView2<f64>,
    norm: EmbeddingNorm,
) -> Result<EmbeddingGrads, NnError> {
    let n = s.nrows() as f64;
    let (z_s, phi_cache) = phi.forward(s)?;
    let (z_sa, psi_cache) = psi.forward(concatenate![Axis(1), z_s, a].view())?;
    let diff = &z_sa - &z_next;
    let mut dout = Array2::zeros(diff.dim());
    let mut loss = 0.0;
    for (i, row) in diff.outer_iter().enumerate() {
        let sq: f64 = row.iter().map(|d| d * d).sum();
        match norm {
            EmbeddingNorm::Euclidean => {
                let len = sq.sqrt();
                loss += len;
                if len > 0.0 {
                    dout.row_mut(i).assign(&(&row / (len * n)));
                }
            }
            EmbeddingNorm::SquaredEuclidean => {
                loss += sq;
                dout.row_mut(i).assign(&(&row * (2.0 / n)));
            }
        }
    }
    loss /= n;
    let psi_g = psi.backward(&psi_cache, dout.view())?;
    let latent = z_s.ncols();
    let dz_s = psi_g
        .input
        .as_ref()
        .expect("backward fills the input cotangent")
        .slice(s![.., ..latent])
        .to_owned();
    let phi_g = phi.backward(&phi_cache, dz_s.view())?;
    Ok(EmbeddingGrads {
        loss,
        phi: phi_g,
        psi: psi_g,
    })
}
