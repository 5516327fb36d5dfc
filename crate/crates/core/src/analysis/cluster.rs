use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterModel {
    pub centroids: Array2<f64>,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    /// Inertia after every assignment pass, starting with the initial one.
    pub inertia_history: Vec<f64>,
    pub silhouette: f64,
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid of every row (lowest index on ties) and the inertia.
fn assign(x: ArrayView2<f64>, c: &Array2<f64>) -> (Vec<usize>, f64) {
    let mut inertia = 0.0;
    let labels = x
        .outer_iter()
        .map(|row| {
            let (mut best, mut best_d) = (0, f64::INFINITY);
            for (j, cj) in c.outer_iter().enumerate() {
                let d = sq_dist(row, cj);
                if d < best_d {
                    best = j;
                    best_d = d;
                }
            }
            inertia += best_d;
            best
        })
        .collect();
    (labels, inertia)
}

/// Lloyd's k-means with seeded farthest-point initialisation: the first
/// centroid is a random sample, each next one the sample farthest from all
/// chosen so far.
pub fn kmeans(
    x: ArrayView2<f64>,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterModel, AnalysisError> {
    let n = x.nrows();
    if k == 0 || k > n {
        return Err(AnalysisError::ClusterCount { k, samples: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = Array2::zeros((k, x.ncols()));
    centroids.row_mut(0).assign(&x.row(rng.random_range(0..n)));
    let mut nearest: Vec<f64> = x
        .outer_iter()
        .map(|r| sq_dist(r, centroids.row(0)))
        .collect();
    for j in 1..k {
        let mut far = 0;
        for i in 1..n {
            if nearest[i] > nearest[far] {
                far = i;
            }
        }
        centroids.row_mut(j).assign(&x.row(far));
        for (i, r) in x.outer_iter().enumerate() {
            nearest[i] = nearest[i].min(sq_dist(r, centroids.row(j)));
        }
    }

    let (mut labels, mut inertia) = assign(x, &centroids);
    let mut history = vec![inertia];
    for _ in 0..max_iter {
        let mut sums = Array2::<f64>::zeros(centroids.dim());
        let mut counts = vec![0usize; k];
        for (row, &l) in x.outer_iter().zip(&labels) {
            let mut s = sums.row_mut(l);
            s += &row;
            counts[l] += 1;
        }
        for (j, &n) in counts.iter().enumerate() {
            if n > 0 {
                centroids.row_mut(j).assign(&(&sums.row(j) / n as f64));
            }
        }
        let (next, next_inertia) = assign(x, &centroids);
        history.push(next_inertia);
        inertia = next_inertia;
        if next == labels {
            break;
        }
        labels = next;
    }
    let silhouette = silhouette(x, &labels, k);
    Ok(ClusterModel {
        centroids,
        assignments: labels,
        inertia,
        inertia_history: history,
        silhouette,
    })
}

/// Mean silhouette coefficient; singleton clusters score 0.
pub fn silhouette(x: ArrayView2<f64>, labels: &[usize], k: usize) -> f64 {
    let n = x.nrows();
    if k < 2 || n < 2 {
        return 0.0;
    }
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        let xi = x.row(i);
        for j in 0..n {
            if i != j {
                sums[labels[j]] += sq_dist(xi, x.row(j)).sqrt();
            }
        }
        let own = labels[i];
        if sizes[own] <= 1 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        if b.is_finite() {
            let m = a.max(b);
            if m > 0.0 {
                total += (b - a) / m;
            }
        }
    }
    total / n as f64
}

/// Silhouette and inertia for one candidate cluster count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KScore {
    pub k: usize,
    pub silhouette: f64,
    pub inertia: f64,
}

/// Fit k-means for every `k` in `ks` and keep the best silhouette.
pub fn select_k(
    x: ArrayView2<f64>,
    ks: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Result<(ClusterModel, Vec<KScore>), AnalysisError> {
    let mut best: Option<ClusterModel> = None;
    let mut scores = Vec::new();
    for k in ks {
        if k > x.nrows() {
            break;
        }
        let m = kmeans(x, k, seed, 300)?;
        scores.push(KScore {
            k,
            silhouette: m.silhouette,
            inertia: m.inertia,
        });
        if best.as_ref().is_none_or(|b| m.silhouette > b.silhouette) {
            best = Some(m);
        }
    }
    let best = best.ok_or(AnalysisError::ClusterCount {
        k: 0,
        samples: x.nrows(),
    })?;
    Ok((best, scores))
}
