//! Tail fits and diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::master::signlog::CompensatedSum;
use crate::tail::TailCurve;

/// Continuous power-law fit of the density `∝ x^{−β}` above `x_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub beta: f64,
    pub x_min: f64,
    pub n_tail: u64,
    pub std_err: f64,
}

/// Maximum-likelihood β over the samples at or above `x_min`.
pub fn fit_power_law_mle(samples: &[f64], x_min: f64) -> Result<PowerLawFit> {
    if !(x_min > 0.0 && x_min.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "x_min must be positive, got {x_min}"
        )));
    }
    let mut log_sum = CompensatedSum::new();
    let mut n_tail = 0u64;
    for &x in samples.iter().filter(|&&x| x >= x_min) {
        log_sum.add((x / x_min).ln());
        n_tail += 1;
    }
    if n_tail < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 samples at or above x_min = {x_min}, found {n_tail}"
        )));
    }
    let s = log_sum.value();
    if !(s > 0.0) {
        return Err(Error::DegenerateFit(
            "every tail sample equals x_min".into(),
        ));
    }
    let n = n_tail as f64;
    let beta = 1.0 + n / s;
    Ok(PowerLawFit {
        beta,
        x_min,
        n_tail,
        std_err: (beta - 1.0) / n.sqrt(),
    })
}

/// Maximum-likelihood exponential rate, `1 / mean`.
pub fn fit_exponential(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::DegenerateFit("no samples".into()));
    }
    let mean = samples.iter().copied().collect::<CompensatedSum>().value() / samples.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::DegenerateFit(format!(
            "sample mean {mean} is not positive"
        )));
    }
    Ok(1.0 / mean)
}

/// Least-squares slope of `ln P` against `ln ω` over points in `[lo, hi]`.
pub fn tail_slope(curve: &TailCurve, lo: f64, hi: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = curve
        .points()
        .iter()
        .filter(|(w, p)| *w >= lo && *w <= hi && *p > 0.0 && *w > 0.0)
        .map(|(w, p)| (w.ln(), p.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Domain(format!(
            "need at least 3 positive points in [{lo}, {hi}], found {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("window holds a single abscissa".into()));
    }
    Ok(sxy / sxx)
}

/// `d_ω = ω(1 − α(ω−1)/α(ω))` for the sequence
/// `α(ω) = Π_{j=ω0+1}^{ω} (1 − (ω0/j)^γ)^{−1} · ω^{−γ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegVarDiag {
    pub gamma: f64,
    pub omega0: u64,
    pub values: Vec<(u64, f64)>,
}

impl RegVarDiag {
    /// CSV with header `omega,d_omega`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,d_omega\n");
        for (w, d) in &self.values {
            out.push_str(&format!("{w},{d}\n"));
        }
        out
    }
}

pub fn regvar_diagnostic(gamma: f64, omega0: u64, omegas: &[u64]) -> Result<RegVarDiag> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!(
            "the diagnostic needs gamma > 1, got {gamma}"
        )));
    }
    if omega0 == 0 {
        return Err(Error::Domain("omega0 must be at least 1".into()));
    }
    if omegas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "omega grid must be strictly increasing".into(),
        ));
    }
    let w0 = omega0 as f64;
    let values = omegas
        .iter()
        .map(|&omega| {
            if omega < omega0 + 2 {
                return Err(Error::Domain(format!(
                    "omega = {omega} is below omega0 + 2"
                )));
            }
            let prev = (omega - 1) as f64;
            // ω(1 − (ω^γ − ω0^γ)/(ω−1)^γ), written to avoid cancellation
            let d =
                omega as f64 * (-(gamma * (1.0 / prev).ln_1p()).exp_m1() + (w0 / prev).powf(gamma));
            Ok((omega, d))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegVarDiag {
        gamma,
        omega0,
        values,
    })
}

/// `sup |a(ω) − b(ω)|` over the union of both curves' points in `[lo, hi]`,
/// with right-continuous step interpolation.
pub fn tail_compare(a: &TailCurve, b: &TailCurve, lo: f64, hi: f64) -> Result<f64> {
    if !(lo <= hi) {
        return Err(Error::Domain(format!("empty window [{lo}, {hi}]")));
    }
    let mut grid: Vec<f64> = a
        .points()
        .iter()
        .chain(b.points())
        .map(|p| p.0)
        .filter(|w| *w >= lo && *w <= hi)
        .collect();
    grid.push(lo);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut sup = 0.0f64;
    for w in grid {
        let (Some(x), Some(y)) = (a.step_value(w), b.step_value(w)) else {
            return Err(Error::Domain(format!(
                "a curve is undefined at omega = {w}"
            )));
        };
        sup = sup.max((x - y).abs());
    }
    Ok(sup)
}
