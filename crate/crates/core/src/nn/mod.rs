//! Dense feedforward networks with hand-written reverse-mode gradients,
//! an Adam optimiser, soft target updates and JSON checkpoints.
//!
//! All arithmetic is in `f64`. Batches are the rows of a 2-D array.

mod adam;
mod mlp;

pub use adam::{adam_step, AdamState};
pub use mlp::{soft_update, Activation, Cache, Dense, Gradients, Mlp};

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("input has {got} columns, network expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("cache does not belong to this network")]
    Cache,
    #[error("network architectures differ")]
    Architecture,
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint format: {0}")]
    Format(#[from] serde_json::Error),
}

/// Write any serialisable model state as JSON. Floats are printed in
/// shortest round-trip form, so loading reproduces parameters bit for bit.
pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), NnError> {
    let w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(w, value)?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, NnError> {
    let r = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn linear(w: f64, b: f64) -> Mlp {
        let mut net = Mlp::zeros(&[1, 1], Activation::Relu, Activation::Identity);
        net.layers[0].w[[0, 0]] = w;
        net.layers[0].b[0] = b;
        net
    }

    #[test]
    fn zero_layer_gives_zero() {
        let net = Mlp::zeros(&[3, 2], Activation::Relu, Activation::Identity);
        let y = net.predict(array![[1.0, -4.0, 9.0]].view()).unwrap();
        assert_eq!(y, array![[0.0, 0.0]]);
    }

    #[test]
    fn identity_layer_passes_input() {
        let mut net = Mlp::zeros(&[2, 2], Activation::Relu, Activation::Identity);
        net.layers[0].w = Array2::eye(2);
        assert_eq!(net.predict_one(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn affine_scalar() {
        assert_eq!(linear(3.0, 1.0).predict_one(&[2.0]).unwrap(), vec![7.0]);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let net = linear(1.0, 0.0);
        assert!(matches!(
            net.predict(array![[1.0, 2.0]].view()),
            Err(NnError::Dimension { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn linear_gradient() {
        let net = linear(3.0, 1.0);
        let (_, cache) = net.forward(array![[2.0]].view()).unwrap();
        let g = net.backward(&cache, array![[1.0]].view()).unwrap();
        assert_eq!(g.layers[0].w[[0, 0]], 2.0);
        assert_eq!(g.layers[0].b[0], 1.0);
        assert_eq!(g.input.unwrap()[[0, 0]], 3.0);
    }

    #[test]
    fn zero_cotangent_zero_gradient() {
        let net = Mlp::new(&[4, 8, 3], Activation::Relu, Activation::Tanh, &mut rng(1));
        let x = Array2::from_elem((5, 4), 0.3);
        let (_, cache) = net.forward(x.view()).unwrap();
        let g = net.backward(&cache, Array2::zeros((5, 3)).view()).unwrap();
        assert_eq!(g.norm(), 0.0);
        assert!(g.input.unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_cache_rejected() {
        let a = Mlp::new(&[2, 3, 1], Activation::Relu, Activation::Identity, &mut rng(1));
        let b = Mlp::new(&[2, 1], Activation::Relu, Activation::Identity, &mut rng(1));
        let (_, cache) = b.forward(array![[1.0, 1.0]].view()).unwrap();
        assert!(a.backward(&cache, array![[1.0]].view()).is_err());
    }

    /// Max relative error between analytic and central-difference gradients
    /// of `sum(c ⊙ f(x))`, over `params` (all when `None`) and the input.
    fn fd_check(net: &Mlp, x: &Array2<f64>, c: &Array2<f64>, params: Option<Vec<usize>>) -> f64 {
        let h = 1e-5;
        let loss = |n: &Mlp, x: &Array2<f64>| (n.predict(x.view()).unwrap() * c).sum();
        let (_, cache) = net.forward(x.view()).unwrap();
        let g = net.backward(&cache, c.view()).unwrap();
        let flat: Vec<f64> = g
            .layers
            .iter()
            .flat_map(|l| l.w.iter().chain(l.b.iter()).copied())
            .collect();
        let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(n.abs()).max(1e-3);
        let mut worst: f64 = 0.0;
        let idx = params.unwrap_or_else(|| (0..net.num_params()).collect());
        for i in idx {
            let mut p = net.clone();
            *p.param_mut(i) += h;
            let up = loss(&p, x);
            *p.param_mut(i) -= 2.0 * h;
            let dn = loss(&p, x);
            worst = worst.max(rel(flat[i], (up - dn) / (2.0 * h)));
        }
        let gin = g.input.unwrap();
        for r in 0..x.nrows() {
            for k in 0..x.ncols() {
                let mut xp = x.clone();
                xp[[r, k]] += h;
                let up = loss(net, &xp);
                xp[[r, k]] -= 2.0 * h;
                let dn = loss(net, &xp);
                worst = worst.max(rel(gin[[r, k]], (up - dn) / (2.0 * h)));
            }
        }
        worst
    }

    fn random_batch(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
        use rand::Rng;
        Array2::from_shape_fn((rows, cols), |_| r.random_range(-1.0..1.0))
    }

    #[test]
    fn finite_difference_three_layers() {
        let mut r = rng(7);
        for output in [Activation::Identity, Activation::Tanh] {
            let net = Mlp::new(&[6, 10, 8, 3], Activation::Relu, output, &mut r);
            let x = random_batch(&mut r, 4, 6);
            let c = random_batch(&mut r, 4, 3);
            let err = fd_check(&net, &x, &c, None);
            assert!(err < 1e-4, "relative error {err}");
        }
    }

    #[test]
    fn finite_difference_full_width_shapes() {
        // Layer shapes of the embedding, actor and critic networks at full
        // width, checked on a random subset of parameters.
        use rand::Rng;
        let mut r = rng(11);
        let shapes: [&[usize]; 3] = [&[25, 256, 256, 256, 512], &[532, 512, 5], &[1044, 512, 512, 1]];
        for widths in shapes {
            let out = widths.len() == 3;
            let net = Mlp::new(
                widths,
                Activation::Relu,
                if out { Activation::Tanh } else { Activation::Identity },
                &mut r,
            );
            let x = random_batch(&mut r, 2, widths[0]);
            let c = random_batch(&mut r, 2, *widths.last().unwrap());
            let picks: Vec<usize> = (0..40).map(|_| r.random_range(0..net.num_params())).collect();
            let err = fd_check(&net, &x, &c, Some(picks));
            assert!(err < 1e-4, "{widths:?}: relative error {err}");
        }
    }

    #[test]
    fn zero_gradient_adam_is_noop_but_counts() {
        let mut net = linear(1.5, 0.0);
        let before = net.clone();
        let mut opt = AdamState::new(&net, 0.1);
        let g = Gradients::zeros_like(&net);
        adam_step(&mut net, &g, &mut opt).unwrap();
        assert_eq!(net, before);
        assert_eq!(opt.step, 1);
    }

    fn quad_grad(net: &Mlp, target: f64) -> Gradients {
        let mut g = Gradients::zeros_like(net);
        g.layers[0].w[[0, 0]] = 2.0 * (net.layers[0].w[[0, 0]] - target);
        g
    }

    #[test]
    fn adam_descends_on_square() {
        let mut net = linear(1.0, 0.0);
        let mut opt = AdamState::new(&net, AdamState::DEFAULT_LR);
        let g = quad_grad(&net, 0.0);
        adam_step(&mut net, &g, &mut opt).unwrap();
        assert!(net.layers[0].w[[0, 0]] < 1.0);
    }

    #[test]
    fn adam_converges_on_shifted_quadratic() {
        let mut net = linear(0.0, 0.0);
        // A step size large enough to travel distance 3 within 1000 steps.
        let mut opt = AdamState::new(&net, 0.1);
        for _ in 0..1000 {
            let g = quad_grad(&net, 3.0);
            adam_step(&mut net, &g, &mut opt).unwrap();
        }
        assert!((net.layers[0].w[[0, 0]] - 3.0).abs() < 1e-2);
    }

    #[test]
    fn nan_gradient_is_skipped() {
        let mut net = linear(1.0, 0.0);
        let before = net.clone();
        let mut opt = AdamState::new(&net, 0.1);
        let mut g = Gradients::zeros_like(&net);
        g.layers[0].b[0] = f64::NAN;
        assert!(!adam_step(&mut net, &g, &mut opt).unwrap());
        assert_eq!(net, before);
        assert_eq!(opt.skipped, 1);
        assert_eq!(opt.step, 0);
    }

    #[test]
    fn soft_update_cases() {
        let online = linear(1.0, 1.0);
        let mut t = linear(0.0, 0.0);
        soft_update(&mut t, &online, 0.01).unwrap();
        assert!((t.layers[0].w[[0, 0]] - 0.01).abs() < 1e-15);
        let before = t.clone();
        soft_update(&mut t, &online, 0.0).unwrap();
        assert_eq!(t, before);
        soft_update(&mut t, &online, 1.0).unwrap();
        assert_eq!(t, online);
        let other = Mlp::zeros(&[2, 1], Activation::Relu, Activation::Identity);
        assert!(matches!(
            soft_update(&mut t, &other, 0.5),
            Err(NnError::Architecture)
        ));
    }

    #[test]
    fn soft_update_contracts_geometrically() {
        let online = linear(1.0, 0.0);
        let mut t = linear(0.0, 0.0);
        let tau = 0.1;
        for k in 1..=20 {
            soft_update(&mut t, &online, tau).unwrap();
            let gap = 1.0 - t.layers[0].w[[0, 0]];
            assert!((gap - (1.0 - tau).powi(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_init() {
        let a = Mlp::new(&[5, 16, 2], Activation::Relu, Activation::Tanh, &mut rng(3));
        let b = Mlp::new(&[5, 16, 2], Activation::Relu, Activation::Tanh, &mut rng(3));
        assert_eq!(a, b);
    }

    #[test]
    fn checkpoint_reproduces_outputs_bitwise() {
        let mut r = rng(5);
        let net = Mlp::new(&[7, 32, 32, 3], Activation::Relu, Activation::Tanh, &mut r);
        let opt = AdamState::new(&net, 3e-4);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.json");
        save_json(&path, &(&net, &opt)).unwrap();
        let (back, opt_back): (Mlp, AdamState) = load_json(&path).unwrap();
        assert_eq!(back, net);
        assert_eq!(opt_back, opt);
        let x = random_batch(&mut r, 9, 7);
        let y0 = net.predict(x.view()).unwrap();
        let y1 = back.predict(x.view()).unwrap();
        assert!(y0.iter().zip(y1.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn gradients_match_finite_differences(seed in 0u64..10_000) {
            let mut r = rng(seed);
            let net = Mlp::new(&[3, 5, 4, 2], Activation::Relu, Activation::Tanh, &mut r);
            let x = random_batch(&mut r, 3, 3);
            let c = random_batch(&mut r, 3, 2);
            // Central differences straddling a ReLU kink are meaningless.
            let (_, cache) = net.forward(x.view()).unwrap();
            let hidden = &cache.pre[..cache.pre.len() - 1];
            prop_assume!(hidden.iter().flatten().all(|z| z.abs() > 1e-3));
            prop_assert!(fd_check(&net, &x, &c, None) < 1e-4);
        }
    }
}
