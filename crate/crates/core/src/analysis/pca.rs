use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::Serialize;

use super::AnalysisError;

/// Principal axes of a sample matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaModel {
    pub mean: Array1<f64>,
    /// One unit-length component per row, by descending eigenvalue.
    pub components: Array2<f64>,
    pub eigenvalues: Array1<f64>,
    /// Set when the samples carry no variance; the basis is then arbitrary.
    pub degenerate: bool,
}

/// Column-wise z-scores. Columns without variance map to 0.
pub fn standardize(x: ArrayView2<f64>) -> Array2<f64> {
    let n = x.nrows().max(1) as f64;
    let mean = x.sum_axis(Axis(0)) / n;
    let mut out = &x - &mean;
    for mut col in out.columns_mut() {
        let sd = (col.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        if sd > 0.0 {
            col /= sd;
        } else {
            col.fill(0.0);
        }
    }
    out
}

/// Unbiased sample covariance of the rows of `x`.
pub fn covariance(x: ArrayView2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = x.nrows() as f64;
    let mean = x.sum_axis(Axis(0)) / n;
    let c = &x - &mean;
    let cov = c.t().dot(&c) / (n - 1.0);
    (mean, cov)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (unsorted) and eigenvectors as columns.
pub fn jacobi_eigen(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[[p, q]] * a[[p, q]];
            }
        }
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[[k, p]], a[[k, q]]);
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[[p, k]], a[[q, k]]);
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diag().to_owned(), v)
}

/// Fit principal components to the rows of `x`.
pub fn pca_fit(x: ArrayView2<f64>) -> Result<PcaModel, AnalysisError> {
    if x.nrows() < 2 || x.ncols() == 0 {
        return Err(AnalysisError::TooFewSamples {
            rows: x.nrows(),
            cols: x.ncols(),
        });
    }
    let (mean, cov) = covariance(x);
    let (vals, vecs) = jacobi_eigen(&cov);
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(i.cmp(&j)));
    let d = vals.len();
    let mut components = Array2::zeros((d, d));
    let mut eigenvalues = Array1::zeros(d);
    for (r, &i) in order.iter().enumerate() {
        components.row_mut(r).assign(&vecs.column(i));
        eigenvalues[r] = vals[i];
    }
    let trace: f64 = cov.diag().sum();
    let magnitude = 1.0 + mean.iter().map(|m| m * m).sum::<f64>();
    Ok(PcaModel {
        degenerate: trace <= 1e-24 * magnitude,
        mean,
        components,
        eigenvalues,
    })
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Coordinates of the rows of `x` on the first `k` components.
    pub fn project(&self, x: ArrayView2<f64>, k: usize) -> Array2<f64> {
        let k = k.min(self.dim());
        (&x - &self.mean).dot(&self.components.slice(s![..k, ..]).t())
    }

    /// Map coordinates on the first `z.ncols()` components back to samples.
    pub fn reconstruct(&self, z: ArrayView2<f64>) -> Array2<f64> {
        z.dot(&self.components.slice(s![..z.ncols(), ..])) + &self.mean
    }

    /// Largest deviation of `CCᵀ` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.components.dot(&self.components.t());
        let eye = Array2::<f64>::eye(self.dim());
        (&g - &eye).iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn explained_ratio(&self) -> Array1<f64> {
        let total: f64 = self.eigenvalues.iter().map(|v| v.max(0.0)).sum();
        if total > 0.0 {
            self.eigenvalues.mapv(|v| v.max(0.0) / total)
        } else {
            Array1::zeros(self.dim())
        }
    }
}

/// Component of `v` along `u`, for tests and diagnostics.
pub fn alignment(u: ArrayView1<f64>, v: ArrayView1<f64>) -> f64 {
    u.dot(&v).abs() / (u.dot(&u).sqrt() * v.dot(&v).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn gaussian(n: usize, d: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Normal::new(0.0, 1.0).unwrap();
        Array2::from_shape_fn((n, d), |_| g.sample(&mut rng))
    }

    #[test]
    fn axis_aligned_samples() {
        let x = array![[-2.0, 0.0], [-1.0, 0.0], [0.5, 0.0], [3.0, 0.0]];
        let m = pca_fit(x.view()).unwrap();
        assert!((m.components[[0, 0]].abs() - 1.0).abs() < 1e-12);
        assert!(m.components[[0, 1]].abs() < 1e-12);
        assert_eq!(m.eigenvalues[1], 0.0);
    }

    #[test]
    fn isotropic_cloud_has_flat_spectrum() {
        let x = gaussian(20_000, 2, 3);
        let m = pca_fit(x.view()).unwrap();
        let ratio = m.eigenvalues[1] / m.eigenvalues[0];
        assert!(ratio > 0.9, "{ratio}");
    }

    #[test]
    fn full_reconstruction_is_identity() {
        let mut x = gaussian(50, 6, 4);
        x.column_mut(2).mapv_inplace(|v| 3.0 * v + 1.0);
        let m = pca_fit(x.view()).unwrap();
        let z = m.project(x.view(), 6);
        let back = m.reconstruct(z.view());
        let err = (&back - &x).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(err < 1e-8, "{err}");
        assert!(m.orthonormality_error() < 1e-8);
    }

    #[test]
    fn spectrum_sorted_and_trace_preserved() {
        let mut x = gaussian(300, 12, 5);
        for j in 0..12 {
            x.column_mut(j).mapv_inplace(|v| v * (j + 1) as f64);
        }
        let (_, cov) = covariance(x.view());
        let m = pca_fit(x.view()).unwrap();
        assert!(m.eigenvalues.windows(2).into_iter().all(|w| w[0] >= w[1]));
        assert!((m.eigenvalues.sum() - cov.diag().sum()).abs() < 1e-8);
        assert!(m.eigenvalues.iter().all(|&v| v >= -1e-10));
    }

    #[test]
    fn identical_samples_are_flagged() {
        let x = Array2::from_elem((5, 3), 0.1);
        let m = pca_fit(x.view()).unwrap();
        assert!(m.degenerate);
        assert!(m.orthonormality_error() < 1e-12);
        assert!(pca_fit(Array2::<f64>::zeros((1, 3)).view()).is_err());
    }

    #[test]
    fn standardized_columns() {
        let x = array![[1.0, 5.0], [3.0, 5.0]];
        let z = standardize(x.view());
        assert_eq!(z, array![[-1.0, 0.0], [1.0, 0.0]]);
    }
}
