use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use feedback_urn::discrete::{run_replica, snapshots_csv, SimConfig};
use feedback_urn::tail::empirical_tail_counts;
use feedback_urn::FeedbackFunction;

use crate::cli::DiscreteArgs;
use crate::config::{self, count_list, one_count, require};
use crate::error::{CliError, CliResult};
use crate::manifest::{now, Outputs};
use crate::parse::CountsValue;

/// Longest run allowed without `--unbounded`.
const BOUNDED_ITERATIONS: u64 = 100_000_000;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "N", alias = "n")]
    n: Option<CountsValue>,
    gamma: Option<f64>,
    eta: Option<f64>,
    checkpoints: Option<CountsValue>,
    seed: Option<u64>,
    initial_counts: Option<Vec<u64>>,
    replicas: Option<u64>,
    parallel: Option<u64>,
    unbounded: Option<bool>,
}

pub fn run(args: DiscreteArgs) -> CliResult<()> {
    let started = now();
    let (file, common): (FileConfig, _) = config::load(args.common.config.as_deref())?;
    let target = config::target(
        args.common.out_dir,
        args.common.name,
        common,
        "simulate-discrete",
    )?;

    let n = require(args.n.or(one_count(file.n, "N")?), "N")?;
    let gamma = require(args.feedback.gamma.or(file.gamma), "gamma")?;
    let eta = args.feedback.eta.or(file.eta).unwrap_or(1.0);
    let checkpoints = require(
        args.checkpoints
            .or(count_list(file.checkpoints, "checkpoints")?),
        "checkpoints",
    )?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let replicas = args.replicas.or(file.replicas).unwrap_or(1);
    let parallel = args.parallel.or(file.parallel).unwrap_or(0);
    let unbounded = args.unbounded || file.unbounded.unwrap_or(false);

    if replicas == 0 {
        return Err(CliError::Usage("--replicas must be at least 1".into()));
    }
    let last = checkpoints.iter().copied().max().unwrap_or(0);
    if last > BOUNDED_ITERATIONS && !unbounded {
        return Err(CliError::Usage(format!(
            "checkpoint {last} exceeds {BOUNDED_ITERATIONS}; pass --unbounded to run it"
        )));
    }
    let n_agents =
        usize::try_from(n).map_err(|_| CliError::Usage(format!("N = {n} is too large")))?;

    let feedback = FeedbackFunction::power_law(eta, gamma)?;
    let mut sim = SimConfig::new(n_agents, feedback, checkpoints.clone(), seed);
    sim.initial_counts = file.initial_counts.clone();
    sim.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel as usize)
        .build()
        .map_err(|e| CliError::Usage(format!("--parallel {parallel}: {e}")))?;
    // Indexed collection keeps replica order independent of scheduling.
    let runs = pool.install(|| {
        (0..replicas)
            .into_par_iter()
            .map(|r| run_replica(&sim, r))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut out = Outputs::new(&target.dir, &target.name)?;
    for (r, snapshots) in runs.iter().enumerate() {
        let infix = if replicas > 1 {
            format!("r{r}.")
        } else {
            String::new()
        };
        out.write(&format!("{infix}snapshots.csv"), &snapshots_csv(snapshots))?;
        for s in snapshots {
            let tail = empirical_tail_counts(&s.counts)?;
            out.write(&format!("{infix}tail.n{}.csv", s.iteration), &tail.to_csv())?;
        }
    }

    let parameters = json!({
        "N": n,
        "gamma": gamma,
        "eta": eta,
        "checkpoints": checkpoints,
        "initial_counts": file.initial_counts,
        "replicas": replicas,
        "parallel": parallel,
        "unbounded": unbounded,
        "name": target.name,
        "out_dir": target.dir,
    });
    let manifest = out.finish(
        "simulate-discrete",
        parameters,
        Some(seed),
        started,
        Vec::new(),
    )?;
    println!("{}", manifest.display());
    Ok(())
}
