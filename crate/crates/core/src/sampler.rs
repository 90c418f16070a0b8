//! Weighted index selection over a mutable set of positive weights.

/// Select index `j` with probability `w_j / Σ w`, with point updates.
pub trait WeightedSampler {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn weight(&self, index: usize) -> f64;

    /// Sum of all weights as maintained by the structure.
    fn total(&self) -> f64;

    fn set(&mut self, index: usize, weight: f64);

    /// Index whose cumulative weight interval contains `u · total`, for `u ∈ [0, 1)`.
    fn select(&self, u: f64) -> usize;

    /// Multiply every weight by `factor`.
    fn rescale(&mut self, factor: f64);

    /// Replace every weight at once.
    fn assign(&mut self, weights: &[f64]) {
        for (i, &w) in weights.iter().enumerate() {
            self.set(i, w);
        }
    }

    fn max_weight(&self) -> f64 {
        (0..self.len()).map(|i| self.weight(i)).fold(0.0, f64::max)
    }
}

/// Full rebuild interval, in updates.
const REBUILD_EVERY: u64 = 1 << 26;
/// How often the maintained total is compared with a fresh sum of the leaves.
const DRIFT_CHECK_EVERY: u64 = 1 << 16;
const DRIFT_TOLERANCE: f64 = 1e-9;

/// Fenwick (binary indexed) tree of partial sums over a power-of-two
/// capacity, so the last node holds the grand total and a draw is a single
/// top-down descent.
#[derive(Debug, Clone)]
pub struct FenwickSampler {
    weights: Vec<f64>,
    /// 1-based; `tree[capacity]` is the total.
    tree: Vec<f64>,
    capacity: usize,
    /// `log2(capacity)`, the longest update path minus one.
    depth: u32,
    updates: u64,
}

impl FenwickSampler {
    pub fn new(weights: Vec<f64>) -> Self {
        let capacity = weights.len().max(1).next_power_of_two();
        let mut sampler = Self {
            weights,
            tree: vec![0.0; capacity + 1],
            capacity,
            depth: capacity.trailing_zeros(),
            updates: 0,
        };
        sampler.rebuild();
        sampler
    }

    /// Recompute every partial sum from the leaves, in O(N).
    pub fn rebuild(&mut self) {
        self.tree.iter_mut().for_each(|t| *t = 0.0);
        self.tree[1..=self.weights.len()].copy_from_slice(&self.weights);
        for i in 1..=self.capacity {
            let parent = i + (i & i.wrapping_neg());
            if parent <= self.capacity {
                self.tree[parent] += self.tree[i];
            }
        }
    }

    /// Relative gap between the maintained total and a fresh sum of leaves.
    pub fn drift(&self) -> f64 {
        let fresh: f64 = self.weights.iter().sum();
        if fresh == 0.0 {
            return 0.0;
        }
        (self.total() - fresh).abs() / fresh
    }

    /// Fixed trip count with masked writes once past the root, so the loop
    /// exit is predictable whatever the index.
    fn add(&mut self, index: usize, delta: f64) {
        let mut i = index + 1;
        for _ in 0..=self.depth {
            let live = ((i <= self.capacity) as u64).wrapping_neg();
            let slot = i.min(self.capacity);
            self.tree[slot] += f64::from_bits(delta.to_bits() & live);
            i += i & i.wrapping_neg();
        }
    }
}

impl WeightedSampler for FenwickSampler {
    fn len(&self) -> usize {
        self.weights.len()
    }

    fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    #[inline]
    fn total(&self) -> f64 {
        self.tree[self.capacity]
    }

    fn set(&mut self, index: usize, weight: f64) {
        let delta = weight - self.weights[index];
        self.weights[index] = weight;
        self.add(index, delta);
        self.updates += 1;
        let due = self.updates.is_multiple_of(REBUILD_EVERY)
            || (self.updates.is_multiple_of(DRIFT_CHECK_EVERY) && self.drift() > DRIFT_TOLERANCE);
        if due {
            self.rebuild();
        }
    }

    #[inline]
    fn select(&self, u: f64) -> usize {
        let mut remaining = u * self.total();
        if remaining >= self.total() {
            return self.weights.len() - 1;
        }
        let mut pos = 0;
        let mut step = self.capacity >> 1;
        // below the root `pos + step` never exceeds the capacity; the body is
        // written with masks so the descent has no data-dependent branches
        while step > 0 {
            let node = self.tree[pos + step];
            let mask = ((node <= remaining) as u64).wrapping_neg();
            remaining -= f64::from_bits(node.to_bits() & mask);
            pos += step & mask as usize;
            step >>= 1;
        }
        // Rounding can push the descent past the last live leaf.
        pos.min(self.weights.len() - 1)
    }

    fn rescale(&mut self, factor: f64) {
        self.weights.iter_mut().for_each(|w| *w *= factor);
        self.rebuild();
    }

    fn assign(&mut self, weights: &[f64]) {
        self.weights.copy_from_slice(weights);
        self.rebuild();
    }
}

/// Reference sampler: O(1) update, O(N) linear scan per draw.
#[derive(Debug, Clone)]
pub struct LinearSampler {
    weights: Vec<f64>,
}

impl LinearSampler {
    pub fn new(weights: Vec<f64>) -> Self {
        Self { weights }
    }
}

impl WeightedSampler for LinearSampler {
    fn len(&self) -> usize {
        self.weights.len()
    }

    fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn set(&mut self, index: usize, weight: f64) {
        self.weights[index] = weight;
    }

    fn select(&self, u: f64) -> usize {
        let target = u * self.total();
        let mut cumulative = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            cumulative += w;
            if target < cumulative {
                return i;
            }
        }
        self.weights.len() - 1
    }

    fn rescale(&mut self, factor: f64) {
        self.weights.iter_mut().for_each(|w| *w *= factor);
    }
}
