use serde::{Deserialize, Serialize};

use super::{Dense, Gradients, Mlp, NnError};

/// Bias-corrected adaptive-moment optimiser state for one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<Dense>,
    pub v: Vec<Dense>,
    pub step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Updates rejected because the gradient was not finite.
    pub skipped: u64,
}

impl AdamState {
    pub const DEFAULT_LR: f64 = 3e-4;

    pub fn new(net: &Mlp, lr: f64) -> Self {
        let zeros: Vec<Dense> = net
            .layers
            .iter()
            .map(|l| Dense::zeros(l.inputs(), l.outputs()))
            .collect();
        Self {
            m: zeros.clone(),
            v: zeros,
            step: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            skipped: 0,
        }
    }

    fn matches(&self, net: &Mlp) -> bool {
        self.m.len() == net.layers.len()
            && self
                .m
                .iter()
                .zip(&net.layers)
                .all(|(m, l)| m.w.dim() == l.w.dim() && m.b.dim() == l.b.dim())
    }
}

/// Descend along `grads`. Returns `Ok(false)` and counts the incident when
/// the gradient holds a NaN or infinity; the network is then untouched.
pub fn adam_step(net: &mut Mlp, grads: &Gradients, opt: &mut AdamState) -> Result<bool, NnError> {
    if !opt.matches(net) || grads.layers.len() != net.layers.len() {
        return Err(NnError::Architecture);
    }
    for (g, l) in grads.layers.iter().zip(&net.layers) {
        if g.w.dim() != l.w.dim() || g.b.dim() != l.b.dim() {
            return Err(NnError::Architecture);
        }
    }
    if !grads.is_finite() {
        opt.skipped += 1;
        return Ok(false);
    }
    opt.step += 1;
    let (b1, b2, eps) = (opt.beta1, opt.beta2, opt.eps);
    let c1 = 1.0 - b1.powf(opt.step as f64);
    let c2 = 1.0 - b2.powf(opt.step as f64);
    let lr = opt.lr;
    let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (v_hat.sqrt() + eps);
    };
    for (((l, g), m), v) in net
        .layers
        .iter_mut()
        .zip(&grads.layers)
        .zip(&mut opt.m)
        .zip(&mut opt.v)
    {
        for (((p, &g), m), v) in l
            .w
            .iter_mut()
            .zip(g.w.iter())
            .zip(m.w.iter_mut())
            .zip(v.w.iter_mut())
        {
            update(p, g, m, v);
        }
        for (((p, &g), m), v) in l
            .b
            .iter_mut()
            .zip(g.b.iter())
            .zip(m.b.iter_mut())
            .zip(v.b.iter_mut())
        {
            update(p, g, m, v);
        }
    }
    Ok(true)
}
