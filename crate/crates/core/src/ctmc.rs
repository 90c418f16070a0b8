//! Continuous-time feedback process: each agent is an independent pure
//! birth chain that waits `Exp(f(ω))` in state ω and then gains a ball.
//!
//! An agent is run until its next jump would land after the time cap
//! `t_M` (it is then a *loser*, frozen at its count at `t_M`) or until its
//! count passes the ball cap `ω_M` (it is taken to have *exploded*). The
//! time cap is checked first, so a jump that would both pass `t_M` and
//! exceed `ω_M` never happens and the agent is a loser.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feedback::FeedbackFunction;
use crate::rng::{exponential, substream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Running,
    HitTimeCap,
    HitBallCap,
}

/// Loser/exploded split of finished trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Loser,
    Exploded,
}

/// Stopping rule shared by a batch of agents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Caps {
    /// `t_M`; may be infinite.
    pub t_max: f64,
    /// `ω_M`; `u64::MAX` means no ball cap.
    pub omega_max: u64,
}

impl Caps {
    pub fn new(t_max: f64, omega_max: u64) -> Self {
        Self { t_max, omega_max }
    }

    fn validate(&self, f: &FeedbackFunction, omega0: u64) -> Result<()> {
        if !(self.t_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_M must be positive, got {}",
                self.t_max
            )));
        }
        if self.omega_max < omega0 {
            return Err(Error::InvalidParameter(format!(
                "omega_M = {} is below omega0 = {omega0}",
                self.omega_max
            )));
        }
        let unbounded_balls = self.omega_max == u64::MAX;
        if unbounded_balls && self.t_max.is_infinite() {
            return Err(Error::InvalidParameter(
                "at least one of t_M, omega_M must be finite".into(),
            ));
        }
        if unbounded_balls {
            if let Some(p) = f.as_power_law() {
                if p.gamma() > 1.0 {
                    // explodes in finite time: the time cap alone may never be reached
                    return Err(Error::InvalidParameter(
                        "explosive feedback needs a finite omega_M".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Where an agent's run stopped, without its path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentEnd {
    pub final_count: u64,
    /// Time of the last jump taken (0 if none).
    pub final_time: f64,
    pub outcome: Outcome,
}

impl AgentEnd {
    pub fn classify(&self) -> Result<Classification> {
        match self.outcome {
            Outcome::HitTimeCap => Ok(Classification::Loser),
            Outcome::HitBallCap => Ok(Classification::Exploded),
            Outcome::Running => Err(Error::StillRunning),
        }
    }
}

/// One agent's path: jump times `t_1 < t_2 < …` and where it stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub omega0: u64,
    pub jump_times: Vec<f64>,
    pub final_count: u64,
    pub final_time: f64,
    pub outcome: Outcome,
}

impl Trajectory {
    pub fn end(&self) -> AgentEnd {
        AgentEnd {
            final_count: self.final_count,
            final_time: self.final_time,
            outcome: self.outcome,
        }
    }
}

fn run_agent<R: Rng + ?Sized>(
    f: &FeedbackFunction,
    omega0: u64,
    caps: Caps,
    rng: &mut R,
    mut on_jump: impl FnMut(f64),
) -> Result<AgentEnd> {
    caps.validate(f, omega0)?;
    let mut t = 0.0;
    let mut count = omega0;
    loop {
        let next = t + exponential(rng, f.evaluate(count)?);
        if next > caps.t_max {
            return Ok(AgentEnd {
                final_count: count,
                final_time: t,
                outcome: Outcome::HitTimeCap,
            });
        }
        t = next;
        count += 1;
        on_jump(t);
        if count > caps.omega_max {
            return Ok(AgentEnd {
                final_count: count,
                final_time: t,
                outcome: Outcome::HitBallCap,
            });
        }
    }
}

/// Simulate one agent from `ω0` under the given caps, recording its path.
pub fn simulate_agent<R: Rng + ?Sized>(
    f: &FeedbackFunction,
    omega0: u64,
    caps: Caps,
    rng: &mut R,
) -> Result<Trajectory> {
    let mut jump_times = Vec::new();
    let end = run_agent(f, omega0, caps, rng, |t| jump_times.push(t))?;
    Ok(Trajectory {
        omega0,
        jump_times,
        final_count: end.final_count,
        final_time: end.final_time,
        outcome: end.outcome,
    })
}

/// As [`simulate_agent`] but keeps only the endpoint.
pub fn simulate_agent_end<R: Rng + ?Sized>(
    f: &FeedbackFunction,
    omega0: u64,
    caps: Caps,
    rng: &mut R,
) -> Result<AgentEnd> {
    run_agent(f, omega0, caps, rng, |_| {})
}

pub fn classify_loser(trajectory: &Trajectory) -> Result<Classification> {
    trajectory.end().classify()
}

/// Endpoints of `n_sims` independent agents, replica `k` drawing from
/// substream `k` of `seed`. `threads = 0` uses rayon's default pool size.
/// The result is ordered by replica and independent of `threads`.
pub fn simulate_batch(
    f: &FeedbackFunction,
    omega0: u64,
    caps: Caps,
    n_sims: u64,
    seed: u64,
    threads: usize,
) -> Result<Vec<AgentEnd>> {
    caps.validate(f, omega0)?;
    let run = || {
        (0..n_sims)
            .into_par_iter()
            .map(|k| simulate_agent_end(f, omega0, caps, &mut substream(seed, k)))
            .collect::<Result<Vec<_>>>()
    };
    if threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run)
    }
}

/// Final counts of the losers in a batch, plus how many agents exploded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoserSample {
    pub counts: Vec<u64>,
    pub t_max: f64,
    pub omega_max: u64,
    pub n_sims: u64,
    pub n_exploded: u64,
    pub seed: u64,
}

impl LoserSample {
    pub fn from_ends(ends: &[AgentEnd], caps: Caps, seed: u64) -> Result<Self> {
        let mut counts = Vec::new();
        let mut n_exploded = 0;
        for end in ends {
            match end.classify()? {
                Classification::Loser => counts.push(end.final_count),
                Classification::Exploded => n_exploded += 1,
            }
        }
        Ok(Self {
            counts,
            t_max: caps.t_max,
            omega_max: caps.omega_max,
            n_sims: ends.len() as u64,
            n_exploded,
            seed,
        })
    }

    pub fn n_losers(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn exploded_fraction(&self) -> f64 {
        self.n_exploded as f64 / self.n_sims as f64
    }

    /// CSV with header `final_count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("final_count\n");
        for c in &self.counts {
            out.push_str(&format!("{c}\n"));
        }
        out
    }

    /// Sidecar metadata `{t_M, omega_M, n_sims, n_losers, n_exploded, seed}`.
    pub fn sidecar(&self) -> LoserSidecar {
        LoserSidecar {
            t_m: self.t_max,
            omega_m: self.omega_max,
            n_sims: self.n_sims,
            n_losers: self.n_losers(),
            n_exploded: self.n_exploded,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoserSidecar {
    #[serde(rename = "t_M")]
    pub t_m: f64,
    #[serde(rename = "omega_M")]
    pub omega_m: u64,
    pub n_sims: u64,
    pub n_losers: u64,
    pub n_exploded: u64,
    pub seed: u64,
}

/// Run `n_sims` agents and keep the losers.
pub fn aggregate_losers(
    f: &FeedbackFunction,
    omega0: u64,
    caps: Caps,
    n_sims: u64,
    seed: u64,
    threads: usize,
) -> Result<LoserSample> {
    if n_sims == 0 {
        return Err(Error::InvalidParameter("n_sims must be at least 1".into()));
    }
    let ends = simulate_batch(f, omega0, caps, n_sims, seed, threads)?;
    LoserSample::from_ends(&ends, caps, seed)
}

/// All jumps of several agents in time order, as `(time, agent index)`.
/// Equal times are ordered by agent index.
pub fn merge_jump_times(trajectories: &[Trajectory]) -> Vec<(f64, usize)> {
    let mut events: Vec<(f64, usize)> = trajectories
        .iter()
        .enumerate()
        .flat_map(|(j, tr)| tr.jump_times.iter().map(move |&t| (t, j)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    events
}

/// Counts of every agent after the first `steps` merged jumps of
/// independent agent chains started from `initial`: the exponential
/// embedding of the discrete model.
pub fn embedded_counts<R: Rng + ?Sized>(
    f: &FeedbackFunction,
    initial: &[u64],
    steps: usize,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let trajectories = initial
        .iter()
        .map(|&w0| {
            // every agent makes exactly `steps` jumps, enough to cover any interleaving
            let caps = Caps::new(f64::INFINITY, w0 + steps as u64 - 1);
            simulate_agent(f, w0, caps, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = initial.to_vec();
    for &(_, j) in merge_jump_times(&trajectories).iter().take(steps) {
        counts[j] += 1;
    }
    Ok(counts)
}
