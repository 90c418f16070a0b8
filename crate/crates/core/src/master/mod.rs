//! Transient mass function of a single agent's pure birth process.

pub mod approx;
pub mod closed;
pub mod ode;
pub mod recursion;
pub mod signlog;

pub use approx::{ApproxQuality, ApproxTerm, TailFlag, TailPrediction};
pub use closed::{closed_form_negbin, closed_form_poisson};
pub use ode::{integrate_master, OdeOptions, OdeSnapshot};
pub use recursion::{MasterSolution, PmfFlag, PmfValue};
pub use signlog::{signed_sum, CompensatedSum, SignedLog, SignedSum};

use crate::error::{Error, Result};
use crate::feedback::FeedbackFunction;

/// Mass function over `ω0..=ω_max`, solved by whichever method the feedback
/// admits: constant feedback has tied rates and goes to the Poisson form.
#[derive(Debug, Clone)]
pub enum TransientPmf {
    Recursion(MasterSolution),
    Poisson {
        eta: f64,
        omega0: u64,
        omega_max: u64,
    },
}

impl TransientPmf {
    pub fn solve(feedback: &FeedbackFunction, omega0: u64, omega_max: u64) -> Result<Self> {
        if let Some(p) = feedback.as_power_law() {
            if p.gamma() == 0.0 {
                if omega0 == 0 {
                    return Err(Error::Domain("omega0 must be at least 1".into()));
                }
                if omega_max < omega0 {
                    return Err(Error::Domain(format!(
                        "omega_max = {omega_max} is below omega0 = {omega0}"
                    )));
                }
                return Ok(Self::Poisson {
                    eta: p.eta(),
                    omega0,
                    omega_max,
                });
            }
        }
        MasterSolution::solve(feedback, omega0, omega_max).map(Self::Recursion)
    }

    pub fn omega0(&self) -> u64 {
        match self {
            Self::Recursion(s) => s.omega0(),
            Self::Poisson { omega0, .. } => *omega0,
        }
    }

    pub fn omega_max(&self) -> u64 {
        match self {
            Self::Recursion(s) => s.omega_max(),
            Self::Poisson { omega_max, .. } => *omega_max,
        }
    }

    pub fn is_poisson(&self) -> bool {
        matches!(self, Self::Poisson { .. })
    }

    pub fn mass(&self, t: f64, omega: u64) -> Result<PmfValue> {
        match self {
            Self::Recursion(s) => s.mass_function(t, omega),
            Self::Poisson {
                eta,
                omega0,
                omega_max,
            } => {
                if omega > *omega_max {
                    return Err(Error::Domain(format!(
                        "omega = {omega} outside solved range [{omega0}, {omega_max}]"
                    )));
                }
                Ok(PmfValue {
                    p: closed_form_poisson(*eta, t, omega, *omega0)?,
                    flag: PmfFlag::Ok,
                    cancellation: 1.0,
                })
            }
        }
    }
}

/// Single-time convenience over [`integrate_master`].
pub fn ode_oracle(
    feedback: &FeedbackFunction,
    omega0: u64,
    t: f64,
    omega_max: u64,
) -> Result<OdeSnapshot> {
    integrate_master(feedback, omega0, omega_max, &[t], OdeOptions::default())
        .map(|mut v| v.pop().expect("one snapshot per time"))
}

/// CSV `omega,t,p,flag`, extended with `p_hat,approx_flag` when an
/// approximation is supplied. Rows run over `t` then `ω`.
pub fn pmf_csv(pmf: &TransientPmf, times: &[f64], approx: Option<&ApproxTerm>) -> Result<String> {
    let mut out = String::from("omega,t,p,flag");
    if approx.is_some() {
        out.push_str(",p_hat,approx_flag");
    }
    out.push('\n');
    for &t in times {
        let shape = approx.map(|a| a.ln_shape(pmf.omega_max()));
        for omega in pmf.omega0()..=pmf.omega_max() {
            let v = pmf.mass(t, omega)?;
            out.push_str(&format!("{omega},{t},{},{}", v.p, v.flag.as_str()));
            if let (Some(a), Some(shape)) = (approx, &shape) {
                let k = (omega - pmf.omega0()) as usize;
                let decay = -a.eta() * (a.omega0() as f64).powf(a.gamma()) * t;
                let p_hat = (shape[k] + decay).exp();
                out.push_str(&format!(",{p_hat},{}", a.quality().as_str()));
            }
            out.push('\n');
        }
    }
    Ok(out)
}
