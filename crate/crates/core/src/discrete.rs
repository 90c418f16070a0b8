//! The discrete-time feedback model: at every iteration one agent gains a
//! ball, agent `j` chosen with probability `f(I_n(j)) / Σ_i f(I_n(i))`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feedback::FeedbackFunction;
use crate::rng::{substream, unit};
use crate::sampler::{FenwickSampler, LinearSampler, WeightedSampler};

/// Weights are renormalised once their total passes this.
const RESCALE_THRESHOLD: f64 = 1e300;
/// Largest ball count whose feedback value is memoised.
const CACHE_LIMIT: u64 = 1 << 20;

/// Ball counts of every agent, plus a sampler over their feedback weights.
///
/// Sampler leaf `j` holds `f(counts[j]) · e^{-log_scale}`; `log_scale` stays
/// zero unless weights had to be renormalised to avoid overflow.
#[derive(Debug, Clone)]
pub struct PopulationState<S = FenwickSampler> {
    feedback: FeedbackFunction,
    counts: Vec<u64>,
    iteration: u64,
    initial_total: u64,
    sampler: S,
    log_scale: f64,
    cache: Vec<f64>,
}

impl PopulationState<FenwickSampler> {
    pub fn new(feedback: FeedbackFunction, counts: Vec<u64>) -> Result<Self> {
        Self::with_sampler(feedback, counts, FenwickSampler::new)
    }
}

impl PopulationState<LinearSampler> {
    /// Same process driven by the O(N) reference sampler.
    pub fn new_linear(feedback: FeedbackFunction, counts: Vec<u64>) -> Result<Self> {
        Self::with_sampler(feedback, counts, LinearSampler::new)
    }
}

impl<S: WeightedSampler> PopulationState<S> {
    pub fn with_sampler(
        feedback: FeedbackFunction,
        counts: Vec<u64>,
        make_sampler: impl FnOnce(Vec<f64>) -> S,
    ) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Config("population needs at least one agent".into()));
        }
        if counts.contains(&0) {
            return Err(Error::Config("initial counts must be positive".into()));
        }
        let initial_total = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::Config("initial counts overflow".into()))?;
        let weights = counts
            .iter()
            .map(|&c| feedback.evaluate(c))
            .collect::<Result<Vec<_>>>()?;
        let mut state = Self {
            sampler: make_sampler(weights),
            feedback,
            counts,
            iteration: 0,
            initial_total,
            log_scale: 0.0,
            cache: Vec::new(),
        };
        if !state.sampler.total().is_finite() || state.sampler.total() > RESCALE_THRESHOLD {
            state.renormalise()?;
        }
        Ok(state)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Sum of the initial counts; `Σ counts = initial_total + iteration`.
    pub fn initial_total(&self) -> u64 {
        self.initial_total
    }

    pub fn sampler(&self) -> &S {
        &self.sampler
    }

    /// `ln` of the factor every sampler weight has been divided by.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn feedback(&self) -> &FeedbackFunction {
        &self.feedback
    }

    /// Probability that agent `j` receives the next ball.
    pub fn selection_probability(&self, j: usize) -> f64 {
        self.sampler.weight(j) / self.sampler.total()
    }

    /// Advance one iteration; returns the agent that gained the ball.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        let u = unit(rng);
        self.step_with_uniform(u)
    }

    /// Advance one iteration using the supplied uniform variate in `[0, 1)`.
    pub fn step_with_uniform(&mut self, u: f64) -> Result<usize> {
        let j = self.sampler.select(u);
        let c = self.counts[j]
            .checked_add(1)
            .ok_or(Error::Overflow { agent: j })?;
        self.counts[j] = c;
        self.iteration += 1;
        let w = self.scaled_weight(c)?;
        if w.is_finite() && self.sampler.total() - self.sampler.weight(j) + w <= RESCALE_THRESHOLD {
            self.sampler.set(j, w);
        } else {
            self.renormalise()?;
        }
        Ok(j)
    }

    fn scaled_weight(&mut self, count: u64) -> Result<f64> {
        if self.log_scale != 0.0 {
            return Ok((self.feedback.ln_evaluate(count)? - self.log_scale).exp());
        }
        if count < CACHE_LIMIT {
            let idx = count as usize;
            if idx >= self.cache.len() {
                self.grow_cache(idx)?;
            }
            return Ok(self.cache[idx]);
        }
        self.feedback.evaluate(count)
    }

    fn grow_cache(&mut self, idx: usize) -> Result<()> {
        let target = ((idx + 1).next_power_of_two().max(64) as u64).min(CACHE_LIMIT);
        let start = self.feedback.domain_start();
        let end = self.feedback.domain_end().unwrap_or(u64::MAX);
        for omega in self.cache.len() as u64..target {
            // outside the domain is stored as NaN and never read: evaluate errors first
            let v = if omega >= start && omega <= end {
                self.feedback.evaluate(omega)?
            } else {
                f64::NAN
            };
            self.cache.push(v);
        }
        if self.cache[idx].is_nan() {
            self.feedback.evaluate(idx as u64)?;
        }
        Ok(())
    }

    /// Divide every weight by the current maximum so the largest is 1.
    fn renormalise(&mut self) -> Result<()> {
        let logs = self
            .counts
            .iter()
            .map(|&c| self.feedback.ln_evaluate(c))
            .collect::<Result<Vec<_>>>()?;
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.log_scale = max;
        let weights: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        self.sampler.assign(&weights);
        Ok(())
    }
}

/// Parameters of one discrete-model run.
#[derive(Debug, Clone, Serialize)]
pub struct SimConfig {
    pub n_agents: usize,
    /// Defaults to one ball per agent when `None`.
    pub initial_counts: Option<Vec<u64>>,
    pub feedback: FeedbackFunction,
    /// Strictly increasing iteration numbers at which to snapshot.
    pub checkpoints: Vec<u64>,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(
        n_agents: usize,
        feedback: FeedbackFunction,
        checkpoints: Vec<u64>,
        seed: u64,
    ) -> Self {
        Self {
            n_agents,
            initial_counts: None,
            feedback,
            checkpoints,
            seed,
        }
    }

    pub fn initial(&self) -> Vec<u64> {
        self.initial_counts
            .clone()
            .unwrap_or_else(|| vec![1; self.n_agents])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(Error::Config("N must be at least 1".into()));
        }
        if let Some(init) = &self.initial_counts {
            if init.len() != self.n_agents {
                return Err(Error::Config(format!(
                    "initial_counts has {} entries, expected N = {}",
                    init.len(),
                    self.n_agents
                )));
            }
        }
        if self.checkpoints.is_empty() {
            return Err(Error::Config("at least one checkpoint is required".into()));
        }
        if self.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "checkpoints must be strictly increasing".into(),
            ));
        }
        let last = *self.checkpoints.last().unwrap();
        let total = self
            .initial()
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .and_then(|t| t.checked_add(last));
        if total.is_none() {
            return Err(Error::Config(format!(
                "checkpoint {last} overflows the 64-bit ball count"
            )));
        }
        Ok(())
    }
}

/// Counts of every agent at one checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    pub iteration: u64,
    pub counts: Vec<u64>,
}

/// Run the model from the configured initial state, snapshotting at each
/// checkpoint. Deterministic in `config.seed`.
pub fn run(config: &SimConfig) -> Result<Vec<Snapshot>> {
    run_replica(config, 0)
}

/// As [`run`], drawing from replica substream `replica`.
pub fn run_replica(config: &SimConfig, replica: u64) -> Result<Vec<Snapshot>> {
    config.validate()?;
    let mut rng = substream(config.seed, replica);
    let mut state = PopulationState::new(config.feedback.clone(), config.initial())?;
    let mut snapshots = Vec::with_capacity(config.checkpoints.len());
    for &checkpoint in &config.checkpoints {
        while state.iteration() < checkpoint {
            state.step(&mut rng)?;
        }
        snapshots.push(Snapshot {
            iteration: checkpoint,
            counts: state.counts().to_vec(),
        });
    }
    Ok(snapshots)
}

/// CSV with header `iteration,agent,count`, one row per agent per snapshot.
/// Agents are numbered from 1.
pub fn snapshots_csv(snapshots: &[Snapshot]) -> String {
    let mut out = String::from("iteration,agent,count\n");
    for s in snapshots {
        for (j, c) in s.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", s.iteration, j + 1, c));
        }
    }
    out
}
