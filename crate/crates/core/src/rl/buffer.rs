use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// One environment step as stored for replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub r: f64,
    pub s_next: Vec<f64>,
    /// True on the final slot of an episode; the bootstrap is masked.
    pub terminal: bool,
}

/// A sampled minibatch, one transition per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub s: Array2<f64>,
    pub a: Array2<f64>,
    pub r: Array1<f64>,
    pub s_next: Array2<f64>,
    /// 1 for terminal transitions, 0 otherwise.
    pub done: Array1<f64>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn from_transitions(ts: &[Transition]) -> Self {
        let n = ts.len();
        let sd = ts.first().map_or(0, |t| t.s.len());
        let ad = ts.first().map_or(0, |t| t.a.len());
        let mut b = Batch {
            s: Array2::zeros((n, sd)),
            a: Array2::zeros((n, ad)),
            r: Array1::zeros(n),
            s_next: Array2::zeros((n, sd)),
            done: Array1::zeros(n),
        };
        for (i, t) in ts.iter().enumerate() {
            b.s.row_mut(i).assign(&Array1::from(t.s.clone()));
            b.a.row_mut(i).assign(&Array1::from(t.a.clone()));
            b.s_next.row_mut(i).assign(&Array1::from(t.s_next.clone()));
            b.r[i] = t.r;
            b.done[i] = if t.terminal { 1.0 } else { 0.0 };
        }
        b
    }
}

/// Fixed-capacity ring buffer with uniform sampling.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    cursor: usize,
    items: Vec<Transition>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            cursor: 0,
            items: Vec::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Insert, overwriting the oldest transition once full.
    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    pub fn get(&self, idx: usize) -> &Transition {
        &self.items[idx]
    }

    /// Uniform indices with replacement.
    pub fn sample_indices<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        assert!(!self.items.is_empty(), "cannot sample an empty buffer");
        (0..n).map(|_| rng.random_range(0..self.items.len())).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Batch {
        let picks: Vec<Transition> = self
            .sample_indices(n, rng)
            .into_iter()
            .map(|i| self.items[i].clone())
            .collect();
        Batch::from_transitions(&picks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tr(k: usize) -> Transition {
        Transition {
            s: vec![k as f64],
            a: vec![0.0],
            r: k as f64,
            s_next: vec![k as f64 + 1.0],
            terminal: false,
        }
    }

    #[test]
    fn ring_overwrites_oldest() {
        let mut b = ReplayBuffer::new(3);
        for k in 0..5 {
            b.push(tr(k));
        }
        assert_eq!(b.len(), 3);
        let mut rs: Vec<f64> = (0..3).map(|i| b.get(i).r).collect();
        rs.sort_by(f64::total_cmp);
        assert_eq!(rs, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn batch_layout() {
        let mut t = tr(1);
        t.terminal = true;
        let b = Batch::from_transitions(&[tr(0), t]);
        assert_eq!(b.len(), 2);
        assert_eq!(b.s[[1, 0]], 1.0);
        assert_eq!(b.s_next[[0, 0]], 1.0);
        assert_eq!(b.done.to_vec(), vec![0.0, 1.0]);
    }

    #[test]
    fn sampling_is_seeded() {
        let mut b = ReplayBuffer::new(100);
        for k in 0..100 {
            b.push(tr(k));
        }
        let x = b.sample_indices(50, &mut ChaCha8Rng::seed_from_u64(1));
        let y = b.sample_indices(50, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(x, y);
    }

    #[test]
    fn sampling_is_uniform_over_full_buffer() {
        let n = 1000;
        let draws = 1_000_000;
        let mut b = ReplayBuffer::new(n);
        for k in 0..n {
            b.push(tr(k));
        }
        let mut counts = vec![0usize; n];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for i in b.sample_indices(draws, &mut rng) {
            counts[i] += 1;
        }
        let p = 1.0 / n as f64;
        let mean = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() <= 5.0 * sd, "count {c}");
        }
    }
}
