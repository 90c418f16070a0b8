use serde::Deserialize;
use serde_json::json;

use feedback_urn::master::{pmf_csv, ApproxQuality, ApproxTerm, TransientPmf};
use feedback_urn::FeedbackFunction;

use crate::cli::MasterArgs;
use crate::config::{self, one_count, require};
use crate::error::{CliError, CliResult};
use crate::manifest::{now, Outputs};
use crate::parse::{time_grid, CountsValue, TimesValue};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    gamma: Option<f64>,
    eta: Option<f64>,
    omega0: Option<u64>,
    t: Option<TimesValue>,
    omega_max: Option<CountsValue>,
    approx: Option<bool>,
    dump_coeffs: Option<bool>,
}

pub fn run(args: MasterArgs) -> CliResult<()> {
    let started = now();
    let (file, common): (FileConfig, _) = config::load(args.common.config.as_deref())?;
    let target = config::target(
        args.common.out_dir,
        args.common.name,
        common,
        "solve-master",
    )?;

    let gamma = require(args.feedback.gamma.or(file.gamma), "gamma")?;
    let eta = args.feedback.eta.or(file.eta).unwrap_or(1.0);
    let omega0 = args.omega0.or(file.omega0).unwrap_or(1);
    let times = match (args.t, file.t) {
        (Some(t), _) => t,
        (None, Some(v)) => v
            .resolve()
            .map_err(|e| CliError::Usage(format!("t: {e}")))?,
        (None, None) => time_grid("1:5:0.5").expect("default grid parses"),
    };
    let omega_max = args
        .omega_max
        .or(one_count(file.omega_max, "omega_max")?)
        .unwrap_or(300);
    let approx = args.approx || file.approx.unwrap_or(false);
    let dump_coeffs = args.dump_coeffs || file.dump_coeffs.unwrap_or(false);

    let feedback = FeedbackFunction::power_law(eta, gamma)?;
    let pmf = TransientPmf::solve(&feedback, omega0, omega_max)?;
    let term = approx
        .then(|| ApproxTerm::new(eta, gamma, omega0))
        .transpose()?;

    let mut notes = Vec::new();
    if pmf.is_poisson() {
        notes.push("gamma = 0: mass function taken from the Poisson closed form".into());
    }

    let mut out = Outputs::new(&target.dir, &target.name)?;
    out.write("pmf.csv", &pmf_csv(&pmf, &times, term.as_ref())?)?;
    if let Some(term) = &term {
        if term.quality() == ApproxQuality::Unreliable {
            notes.push(format!(
                "omega0 = {omega0}: first-term approximation is only reliable from omega0 = 1"
            ));
        }
        for &t in &times {
            let mut csv = String::from("omega,tail_prob,flag\n");
            for (w, p) in term.predicted_tail_curve(t, omega_max)? {
                csv.push_str(&format!("{w},{},{}\n", p.value, p.flag.as_str()));
            }
            out.write(&format!("predicted_tail.t{t}.csv"), &csv)?;
        }
    }
    if dump_coeffs {
        match &pmf {
            TransientPmf::Recursion(solution) => {
                out.write("coeffs.csv", &solution.coefficients_csv())?;
            }
            TransientPmf::Poisson { .. } => {
                notes.push("no recursion coefficients for gamma = 0".into())
            }
        }
    }

    let parameters = json!({
        "gamma": gamma,
        "eta": eta,
        "omega0": omega0,
        "t": times,
        "omega_max": omega_max,
        "approx": approx,
        "dump_coeffs": dump_coeffs,
        "name": target.name,
        "out_dir": target.dir,
    });
    let manifest = out.finish("solve-master", parameters, None, started, notes)?;
    println!("{}", manifest.display());
    Ok(())
}
