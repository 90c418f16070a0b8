use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::json;

use feedback_urn::analysis::tail_compare;
use feedback_urn::{TailCurve, TailSource};

use crate::cli::CompareArgs;
use crate::config::{self, require};
use crate::error::{CliError, CliResult};
use crate::manifest::{now, Outputs};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    a: Option<PathBuf>,
    b: Option<PathBuf>,
    lo: Option<f64>,
    hi: Option<f64>,
}

/// Read `omega,tail_prob` (extra columns ignored). Curves that pass the
/// empirical checks are treated as empirical; anything else, such as a
/// predicted tail that dips negative, only needs increasing ω.
fn read_tail(path: &Path) -> CliResult<TailCurve> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::input(path, e))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::input(path, e))?
        .clone();
    let find = |name: &str, fallback: usize| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .unwrap_or(fallback)
    };
    let (wi, pi) = (find("omega", 0), find("tail_prob", 1));
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(path, e))?;
        let num = |i: usize| -> CliResult<f64> {
            let field = record.get(i).unwrap_or("");
            field.trim().parse().map_err(|_| {
                CliError::input(path, format!("row {}: `{field}` is not a number", line + 2))
            })
        };
        points.push((num(wi)?, num(pi)?));
    }
    if points.is_empty() {
        return Err(CliError::input(path, "no tail points"));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(CliError::input(path, "omega must be strictly increasing"));
    }
    Ok(TailCurve::new(points.clone(), TailSource::Empirical)
        .unwrap_or_else(|_| TailCurve::predicted_unchecked(points)))
}

pub fn run(args: CompareArgs) -> CliResult<()> {
    let started = now();
    let (file, common): (FileConfig, _) = config::load(args.common.config.as_deref())?;
    let target = config::target(
        args.common.out_dir,
        args.common.name,
        common,
        "compare-tails",
    )?;

    let a_path = require(args.a.or(file.a), "a")?;
    let b_path = require(args.b.or(file.b), "b")?;
    let (a, b) = (read_tail(&a_path)?, read_tail(&b_path)?);
    let lo = args
        .lo
        .or(file.lo)
        .unwrap_or_else(|| a.points()[0].0.max(b.points()[0].0));
    let hi = args.hi.or(file.hi).unwrap_or(f64::INFINITY);

    let sup = tail_compare(&a, &b, lo, hi)?;
    // JSON has no infinity, so an open window is written as null.
    let finite = |x: f64| x.is_finite().then_some(x);
    let report = json!({ "sup_abs_diff": sup, "lo": finite(lo), "hi": finite(hi) });
    let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";

    let mut out = Outputs::new(&target.dir, &target.name)?;
    out.write("compare.json", &text)?;
    let parameters = json!({
        "a": a_path,
        "b": b_path,
        "lo": finite(lo),
        "hi": finite(hi),
        "name": target.name,
        "out_dir": target.dir,
    });
    out.finish("compare-tails", parameters, None, started, Vec::new())?;
    print!("{text}");
    Ok(())
}
