use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::NnError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: &mut Array2<f64>) {
        match self {
            Activation::Identity => {}
            Activation::Relu => z.mapv_inplace(|x| x.max(0.0)),
            Activation::Tanh => z.mapv_inplace(f64::tanh),
        }
    }

    /// Multiply `g` in place by the derivative, given pre-activation `z`
    /// and output `y`.
    fn backprop(self, g: &mut Array2<f64>, z: &Array2<f64>, y: &Array2<f64>) {
        match self {
            Activation::Identity => {}
            Activation::Relu => g.zip_mut_with(z, |g, &z| {
                if z <= 0.0 {
                    *g = 0.0
                }
            }),
            Activation::Tanh => g.zip_mut_with(y, |g, &y| *g *= 1.0 - y * y),
        }
    }
}

/// One affine layer. `w` is `inputs × outputs` so a batch row-vector
/// multiplies from the left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            w: Array2::zeros((inputs, outputs)),
            b: Array1::zeros(outputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.w.nrows()
    }

    pub fn outputs(&self) -> usize {
        self.w.ncols()
    }
}

/// Feedforward network: affine layers with a shared hidden activation and a
/// separate output activation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
    pub hidden: Activation,
    pub output: Activation,
}

/// Activations recorded by [`Mlp::forward`]; consumed by [`Mlp::backward`].
#[derive(Debug, Clone)]
pub struct Cache {
    /// Input of every layer, then the final output.
    pub inputs: Vec<Array2<f64>>,
    /// Pre-activation of every layer.
    pub pre: Vec<Array2<f64>>,
}

impl Cache {
    pub fn output(&self) -> &Array2<f64> {
        self.inputs.last().expect("cache holds at least the input")
    }

    /// Post-activation output of hidden layer `k`.
    pub fn hidden(&self, k: usize) -> &Array2<f64> {
        &self.inputs[k + 1]
    }
}

/// Parameter cotangents mirroring an [`Mlp`], plus the input cotangent.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
    pub input: Option<Array2<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| Dense::zeros(l.inputs(), l.outputs()))
                .collect(),
            input: None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.w.iter().chain(l.b.iter()).all(|x| x.is_finite()))
    }

    pub fn scale(&mut self, k: f64) {
        for l in &mut self.layers {
            l.w *= k;
            l.b *= k;
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.w += &b.w;
            a.b += &b.b;
        }
    }

    pub fn norm(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.w.iter().chain(l.b.iter()))
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

impl Mlp {
    /// Fan-in scaled uniform initialisation: weights and biases of a layer
    /// with `n` inputs are drawn from `U(-1/√n, 1/√n)`.
    pub fn new<R: Rng + ?Sized>(
        widths: &[usize],
        hidden: Activation,
        output: Activation,
        rng: &mut R,
    ) -> Self {
        assert!(widths.len() >= 2, "an Mlp needs input and output widths");
        let layers = widths
            .windows(2)
            .map(|w| {
                let bound = 1.0 / (w[0] as f64).sqrt();
                let mut d = Dense::zeros(w[0], w[1]);
                d.w.mapv_inplace(|_| rng.random_range(-bound..bound));
                d.b.mapv_inplace(|_| rng.random_range(-bound..bound));
                d
            })
            .collect();
        Self {
            layers,
            hidden,
            output,
        }
    }

    pub fn zeros(widths: &[usize], hidden: Activation, output: Activation) -> Self {
        assert!(widths.len() >= 2, "an Mlp needs input and output widths");
        Self {
            layers: widths.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect(),
            hidden,
            output,
        }
    }

    /// Multiply the final layer's parameters by `k`.
    pub fn scale_last_layer(&mut self, k: f64) {
        let last = self.layers.last_mut().expect("non-empty");
        last.w *= k;
        last.b *= k;
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.layers[0].inputs()];
        w.extend(self.layers.iter().map(|l| l.outputs()));
        w
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").outputs()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.w.iter().chain(l.b.iter()).all(|x| x.is_finite()))
    }

    pub fn same_shape(&self, other: &Mlp) -> bool {
        self.widths() == other.widths()
    }

    fn activation(&self, k: usize) -> Activation {
        if k + 1 == self.layers.len() {
            self.output
        } else {
            self.hidden
        }
    }

    fn check_input(&self, x: &ArrayView2<f64>) -> Result<(), NnError> {
        if x.ncols() != self.input_dim() {
            return Err(NnError::Dimension {
                expected: self.input_dim(),
                got: x.ncols(),
            });
        }
        Ok(())
    }

    /// Batched forward pass over the rows of `x`, keeping the cache.
    pub fn forward(&self, x: ArrayView2<f64>) -> Result<(Array2<f64>, Cache), NnError> {
        self.check_input(&x)?;
        let mut inputs = Vec::with_capacity(self.layers.len() + 1);
        let mut pre = Vec::with_capacity(self.layers.len());
        inputs.push(x.to_owned());
        for (k, l) in self.layers.iter().enumerate() {
            let z = inputs[k].dot(&l.w) + &l.b;
            let mut y = z.clone();
            self.activation(k).apply(&mut y);
            pre.push(z);
            inputs.push(y);
        }
        let out = inputs.last().expect("non-empty").clone();
        Ok((out, Cache { inputs, pre }))
    }

    /// Batched forward pass without a cache.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, NnError> {
        self.check_input(&x)?;
        let mut h = x.to_owned();
        for (k, l) in self.layers.iter().enumerate() {
            h = h.dot(&l.w) + &l.b;
            self.activation(k).apply(&mut h);
        }
        Ok(h)
    }

    /// Forward pass of a single input vector.
    pub fn predict_one(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        let view = ArrayView2::from_shape((1, x.len()), x).expect("row shape");
        Ok(self.predict(view)?.into_raw_vec_and_offset().0)
    }

    /// Reverse-mode gradients of `sum(dout ⊙ output)` with respect to every
    /// parameter and to the input, summed over the batch.
    pub fn backward(&self, cache: &Cache, dout: ArrayView2<f64>) -> Result<Gradients, NnError> {
        if cache.pre.len() != self.layers.len() {
            return Err(NnError::Cache);
        }
        let out = cache.output();
        if dout.dim() != out.dim() {
            return Err(NnError::Dimension {
                expected: out.ncols(),
                got: dout.ncols(),
            });
        }
        let mut layers = Vec::with_capacity(self.layers.len());
        let mut g = dout.to_owned();
        for k in (0..self.layers.len()).rev() {
            let l = &self.layers[k];
            if cache.inputs[k].ncols() != l.inputs() || cache.pre[k].ncols() != l.outputs() {
                return Err(NnError::Cache);
            }
            self.activation(k)
                .backprop(&mut g, &cache.pre[k], &cache.inputs[k + 1]);
            let dw = cache.inputs[k].t().dot(&g);
            let db = g.sum_axis(Axis(0));
            let gin = g.dot(&l.w.t());
            layers.push(Dense { w: dw, b: db });
            g = gin;
        }
        layers.reverse();
        Ok(Gradients {
            layers,
            input: Some(g),
        })
    }

    /// Flattened view of every parameter, layer by layer (`w` then `b`).
    pub fn params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.w.iter().chain(l.b.iter()).copied())
            .collect()
    }

    /// Mutable access to parameter `idx` in [`Mlp::params`] order.
    pub fn param_mut(&mut self, mut idx: usize) -> &mut f64 {
        for l in &mut self.layers {
            if idx < l.w.len() {
                return l.w.iter_mut().nth(idx).expect("in range");
            }
            idx -= l.w.len();
            if idx < l.b.len() {
                return &mut l.b[idx];
            }
            idx -= l.b.len();
        }
        panic!("parameter index out of range");
    }
}

/// `target ← (1 − tau)·target + tau·online`, elementwise.
pub fn soft_update(target: &mut Mlp, online: &Mlp, tau: f64) -> Result<(), NnError> {
    if !target.same_shape(online) {
        return Err(NnError::Architecture);
    }
    for (t, o) in target.layers.iter_mut().zip(&online.layers) {
        t.w.zip_mut_with(&o.w, |t, &o| *t = (1.0 - tau) * *t + tau * o);
        t.b.zip_mut_with(&o.b, |t, &o| *t = (1.0 - tau) * *t + tau * o);
    }
    Ok(())
}
