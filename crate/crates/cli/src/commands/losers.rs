use serde::Deserialize;
use serde_json::json;

use feedback_urn::ctmc::{simulate_batch, Caps, LoserSample};
use feedback_urn::tail::empirical_tail_counts;
use feedback_urn::{Error, FeedbackFunction};

use crate::cli::LosersArgs;
use crate::config::{self, one_count, require};
use crate::error::{CliError, CliResult};
use crate::manifest::{now, Outputs};
use crate::parse::CountsValue;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    gamma: Option<f64>,
    eta: Option<f64>,
    omega0: Option<u64>,
    n_sims: Option<CountsValue>,
    omega_max: Option<CountsValue>,
    #[serde(rename = "tM", alias = "t_M")]
    t_m: Option<TimeCap>,
    seed: Option<u64>,
    parallel: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum TimeCap {
    Value(f64),
    Text(String),
}

fn parse_time_cap(cap: TimeCap) -> CliResult<Option<f64>> {
    match cap {
        TimeCap::Value(t) => Ok(Some(t)),
        TimeCap::Text(s) if s.trim() == "auto" => Ok(None),
        TimeCap::Text(s) => s
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("--tM: `{s}` is neither `auto` nor a number"))),
    }
}

pub fn run(args: LosersArgs) -> CliResult<()> {
    let started = now();
    let (file, common): (FileConfig, _) = config::load(args.common.config.as_deref())?;
    let target = config::target(
        args.common.out_dir,
        args.common.name,
        common,
        "simulate-losers",
    )?;

    let gamma = require(args.feedback.gamma.or(file.gamma), "gamma")?;
    let eta = args.feedback.eta.or(file.eta).unwrap_or(1.0);
    let omega0 = args.omega0.or(file.omega0).unwrap_or(1);
    let n_sims = args
        .n_sims
        .or(one_count(file.n_sims, "n_sims")?)
        .unwrap_or(10_000);
    let omega_max = args
        .omega_max
        .or(one_count(file.omega_max, "omega_max")?)
        .unwrap_or(10_000);
    let t_cap = args
        .t_m
        .map(TimeCap::Text)
        .or(file.t_m)
        .unwrap_or(TimeCap::Text("auto".into()));
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let parallel = args.parallel.or(file.parallel).unwrap_or(0);

    let feedback = FeedbackFunction::power_law(eta, gamma)?;
    let mut notes = Vec::new();
    let t_max = match parse_time_cap(t_cap)? {
        Some(t) => t,
        None => {
            let t = match feedback.explosion_time_bounds(omega0) {
                Ok(b) => b.lower,
                Err(Error::NonExplosive { gamma }) => {
                    return Err(CliError::Core(Error::Domain(format!(
                        "--tM auto needs gamma > 1 (got {gamma}); the explosion time scale is undefined"
                    ))))
                }
                Err(e) => return Err(e.into()),
            };
            notes.push(format!("tM auto resolved to {t}"));
            t
        }
    };

    let caps = Caps::new(t_max, omega_max);
    if n_sims == 0 {
        return Err(CliError::Usage("--n-sims must be at least 1".into()));
    }
    let ends = simulate_batch(&feedback, omega0, caps, n_sims, seed, parallel as usize)?;
    let sample = LoserSample::from_ends(&ends, caps, seed)?;
    // every agent, exploded ones at their capped count
    let all: Vec<u64> = ends.iter().map(|e| e.final_count).collect();

    let mut out = Outputs::new(&target.dir, &target.name)?;
    out.write("losers.csv", &sample.to_csv())?;
    let sidecar = serde_json::to_string_pretty(&sample.sidecar()).expect("sidecar serialises");
    out.write("losers.json", &(sidecar + "\n"))?;
    out.write("feedback_tail.csv", &empirical_tail_counts(&all)?.to_csv())?;
    if sample.counts.is_empty() {
        notes.push("every agent exploded; no loser tail written".into());
    } else {
        out.write(
            "loser_tail.csv",
            &empirical_tail_counts(&sample.counts)?.to_csv(),
        )?;
    }

    let parameters = json!({
        "gamma": gamma,
        "eta": eta,
        "omega0": omega0,
        "n_sims": n_sims,
        "omega_max": omega_max,
        "tM": t_max,
        "parallel": parallel,
        "name": target.name,
        "out_dir": target.dir,
    });
    let manifest = out.finish("simulate-losers", parameters, Some(seed), started, notes)?;
    println!("{}", manifest.display());
    Ok(())
}
