use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use feedback_urn::analysis::{fit_exponential, fit_power_law_mle, PowerLawFit};

use crate::cli::{FitArgs, FitMode};
use crate::config::{self, require};
use crate::error::{CliError, CliResult};
use crate::manifest::{now, Outputs};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<PathBuf>,
    column: Option<String>,
    mode: Option<FitMode>,
    xmin: Option<f64>,
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
enum FitReport {
    PowerLaw {
        #[serde(flatten)]
        fit: PowerLawFit,
    },
    Exponential {
        rate: f64,
        n: u64,
    },
}

/// One numeric column of a headed CSV; the first column when `column` is `None`.
pub fn read_column(path: &Path, column: Option<&str>) -> CliResult<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::input(path, e))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::input(path, e))?
        .clone();
    let index = match column {
        None => 0,
        Some(name) => headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::input(path, format!("no column named `{name}`")))?,
    };
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(path, e))?;
        let field = record.get(index).ok_or_else(|| {
            CliError::input(path, format!("row {} has no column {index}", line + 2))
        })?;
        let x = field.trim().parse::<f64>().map_err(|_| {
            CliError::input(path, format!("row {}: `{field}` is not a number", line + 2))
        })?;
        values.push(x);
    }
    Ok(values)
}

pub fn run(args: FitArgs) -> CliResult<()> {
    let started = now();
    let (file, common): (FileConfig, _) = config::load(args.common.config.as_deref())?;
    let target = config::target(args.common.out_dir, args.common.name, common, "fit")?;

    let input = require(args.input.or(file.input), "input")?;
    let column = args.column.or(file.column);
    let mode = args.mode.or(file.mode).unwrap_or(FitMode::PowerLaw);
    let xmin = args.xmin.or(file.xmin);
    if mode == FitMode::PowerLaw && xmin.is_none() {
        return Err(CliError::Usage(
            "--xmin is required in power-law mode".into(),
        ));
    }

    let samples = read_column(&input, column.as_deref())?;
    let report = match mode {
        FitMode::PowerLaw => FitReport::PowerLaw {
            fit: fit_power_law_mle(&samples, xmin.expect("checked above"))?,
        },
        FitMode::Exponential => FitReport::Exponential {
            rate: fit_exponential(&samples)?,
            n: samples.len() as u64,
        },
    };
    let text = serde_json::to_string_pretty(&report).expect("fit serialises") + "\n";

    let mut out = Outputs::new(&target.dir, &target.name)?;
    out.write("fit.json", &text)?;
    let parameters = json!({
        "input": input,
        "column": column,
        "mode": mode,
        "xmin": xmin,
        "name": target.name,
        "out_dir": target.dir,
    });
    out.finish("fit", parameters, None, started, Vec::new())?;
    print!("{text}");
    Ok(())
}
