use serde::Deserialize;
use serde_json::json;

use feedback_urn::analysis::regvar_diagnostic;

use crate::cli::RegvarArgs;
use crate::config::{self, count_list, require};
use crate::error::CliResult;
use crate::manifest::{now, Outputs};
use crate::parse::CountsValue;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    gamma: Option<f64>,
    omega0: Option<u64>,
    omega_grid: Option<CountsValue>,
}

pub fn run(args: RegvarArgs) -> CliResult<()> {
    let started = now();
    let (file, common): (FileConfig, _) = config::load(args.common.config.as_deref())?;
    let target = config::target(args.common.out_dir, args.common.name, common, "regvar")?;

    let gamma = require(args.gamma.or(file.gamma), "gamma")?;
    let omega0 = args.omega0.or(file.omega0).unwrap_or(1);
    let grid = args
        .omega_grid
        .or(count_list(file.omega_grid, "omega_grid")?)
        .unwrap_or_else(|| vec![100, 1_000, 10_000]);

    let diag = regvar_diagnostic(gamma, omega0, &grid)?;

    let mut out = Outputs::new(&target.dir, &target.name)?;
    out.write("regvar.csv", &diag.to_csv())?;
    let parameters = json!({
        "gamma": gamma,
        "omega0": omega0,
        "omega_grid": grid,
        "name": target.name,
        "out_dir": target.dir,
    });
    let manifest = out.finish("regvar", parameters, None, started, Vec::new())?;
    println!("{}", manifest.display());
    Ok(())
}
