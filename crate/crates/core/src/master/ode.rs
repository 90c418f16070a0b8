//! Direct integration of the truncated master equation.
//!
//! States `ω0..=ω_max` are kept explicitly; flow out of `ω_max` goes to an
//! absorbing cell, so the truncation is exact for every kept state and the
//! absorbed mass reports how much has left the window.

use crate::error::{Error, Result};
use crate::feedback::FeedbackFunction;

/// Adaptive Dormand–Prince 5(4) settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-15,
            max_steps: 10_000_000,
        }
    }
}

/// Mass function at one time point.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSnapshot {
    pub t: f64,
    /// `p_t(ω)` for `ω = ω0..=ω_max`.
    pub pmf: Vec<f64>,
    /// `P(W_t > ω_max)`.
    pub escaped: f64,
}

impl OdeSnapshot {
    pub fn mass(&self, omega0: u64, omega: u64) -> Option<f64> {
        omega
            .checked_sub(omega0)
            .and_then(|k| self.pmf.get(k as usize).copied())
    }
}

struct Pure {
    rates: Vec<f64>,
}

impl Pure {
    /// Right-hand side; the last slot is the absorbing cell.
    fn derivative(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.rates.len();
        let mut inflow = 0.0;
        for k in 0..n {
            let out = self.rates[k] * y[k];
            dy[k] = inflow - out;
            inflow = out;
        }
        dy[n] = inflow;
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate from the point mass at `omega0` and report the mass function at
/// each time in `times` (nondecreasing, nonnegative).
pub fn integrate_master(
    feedback: &FeedbackFunction,
    omega0: u64,
    omega_max: u64,
    times: &[f64],
    opts: OdeOptions,
) -> Result<Vec<OdeSnapshot>> {
    if omega_max < omega0 {
        return Err(Error::Domain(format!(
            "omega_max = {omega_max} is below omega0 = {omega0}"
        )));
    }
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::Domain("times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("times must be nondecreasing".into()));
    }
    let rates = (omega0..=omega_max)
        .map(|w| feedback.evaluate(w))
        .collect::<Result<Vec<_>>>()?;
    let n = rates.len();
    let sys = Pure { rates };

    let mut y = vec![0.0; n + 1];
    y[0] = 1.0;
    let mut t = 0.0;
    let max_rate = sys.rates.iter().copied().fold(0.0, f64::max);
    let mut h = if max_rate > 0.0 { 0.01 / max_rate } else { 1.0 };
    let mut steps = 0usize;

    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n + 1]; 7];
    let mut stage = vec![0.0; n + 1];
    let mut next = vec![0.0; n + 1];
    sys.derivative(&y, &mut k[0]);

    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::Integration(format!(
                    "step limit {} reached at t = {t}",
                    opts.max_steps
                )));
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            for s in 1..7 {
                for j in 0..=n {
                    let mut acc = 0.0;
                    for (m, a) in A[s][..s].iter().enumerate() {
                        acc += a * k[m][j];
                    }
                    stage[j] = y[j] + step * acc;
                }
                sys.derivative(&stage, &mut k[s]);
            }
            // stage now holds the fifth-order solution (FSAL)
            let mut err = 0.0f64;
            for j in 0..=n {
                let mut e = 0.0;
                for m in 0..7 {
                    e += E[m] * k[m][j];
                }
                let scale = opts.atol + opts.rtol * y[j].abs().max(stage[j].abs());
                err = err.max((step * e).abs() / scale);
            }
            steps += 1;
            if err <= 1.0 {
                t = if last { target } else { t + step };
                next.copy_from_slice(&stage);
                std::mem::swap(&mut y, &mut next);
                k.swap(0, 6);
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                // a short landing step says nothing about the safe size
                if !last || step >= h {
                    h *= factor;
                }
            } else {
                h = step * factor;
            }
            if h <= f64::EPSILON * t.max(1.0) {
                return Err(Error::Integration(format!(
                    "step size underflow at t = {t}"
                )));
            }
        }
        out.push(OdeSnapshot {
            t: target,
            pmf: y[..n].to_vec(),
            escaped: y[n],
        });
    }
    Ok(out)
}
