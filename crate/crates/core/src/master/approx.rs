//! Leading-term approximation of the power-law mass function and the tail
//! prediction built from it.
//!
//! Keeping only the `i = ω0` term of the recursion solution gives
//!
//! ```text
//! p̂_t(ω) = e^{−η ω0^γ t} · Π_{j=ω0+1}^{ω} (1 − (ω0/j)^γ)^{−1} · (ω0/ω)^γ
//! ```
//!
//! which is regularly varying in ω with index −γ.

use serde::Serialize;

use super::signlog::CompensatedSum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxQuality {
    Reliable,
    /// Starting above one ball; the leading term is known to fit poorly.
    Unreliable,
}

impl ApproxQuality {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Reliable => "ok",
            Self::Unreliable => "unreliable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailFlag {
    Ok,
    /// Prediction fell below zero.
    Negative,
    Unreliable,
}

impl TailFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Negative => "negative",
            Self::Unreliable => "unreliable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPrediction {
    pub value: f64,
    pub flag: TailFlag,
}

/// Parameters of `p̂_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxTerm {
    eta: f64,
    gamma: f64,
    omega0: u64,
}

impl ApproxTerm {
    pub fn new(eta: f64, gamma: f64, omega0: u64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eta must be positive, got {eta}"
            )));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "the leading-term approximation needs gamma > 0, got {gamma}"
            )));
        }
        if omega0 == 0 {
            return Err(Error::Domain("omega0 must be at least 1".into()));
        }
        Ok(Self { eta, gamma, omega0 })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega0(&self) -> u64 {
        self.omega0
    }

    pub fn quality(&self) -> ApproxQuality {
        if self.omega0 == 1 {
            ApproxQuality::Reliable
        } else {
            ApproxQuality::Unreliable
        }
    }

    /// `ln(1 − (ω0/j)^γ)`.
    fn ln_one_minus_ratio(&self, j: u64) -> f64 {
        let r = self.gamma * (self.omega0 as f64 / j as f64).ln();
        (-r.exp_m1()).ln()
    }

    /// `ln p̂_t(ω) + η ω0^γ t`, the time-independent part, for
    /// `ω = ω0..=omega_max`.
    pub fn ln_shape(&self, omega_max: u64) -> Vec<f64> {
        let ln_w0 = (self.omega0 as f64).ln();
        let mut product = CompensatedSum::new();
        let mut out = Vec::with_capacity((omega_max.saturating_sub(self.omega0) + 1) as usize);
        out.push(0.0);
        for omega in self.omega0 + 1..=omega_max {
            product.add(-self.ln_one_minus_ratio(omega));
            out.push(product.value() + self.gamma * (ln_w0 - (omega as f64).ln()));
        }
        out
    }

    fn decay(&self, t: f64) -> f64 {
        -self.eta * (self.omega0 as f64).powf(self.gamma) * t
    }

    fn check(&self, t: f64, omega: u64) -> Result<()> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
        }
        if omega < self.omega0 {
            return Err(Error::Domain(format!(
                "omega {omega} is below omega0 {}",
                self.omega0
            )));
        }
        Ok(())
    }

    /// `p̂_t(ω)`.
    pub fn first_term_approx(&self, t: f64, omega: u64) -> Result<f64> {
        self.check(t, omega)?;
        let shape = *self.ln_shape(omega).last().unwrap();
        Ok((shape + self.decay(t)).exp())
    }

    /// `1 − Σ_{k=ω0}^{ω−1} p̂_t(k)`; may be negative for small t.
    pub fn predicted_tail(&self, t: f64, omega: u64) -> Result<TailPrediction> {
        self.check(t, omega)?;
        Ok(self
            .predicted_tail_curve(t, omega)?
            .pop()
            .map(|(_, p)| p)
            .unwrap())
    }

    /// Predicted tail at every `ω = ω0..=omega_max`.
    pub fn predicted_tail_curve(
        &self,
        t: f64,
        omega_max: u64,
    ) -> Result<Vec<(u64, TailPrediction)>> {
        self.check(t, omega_max)?;
        let decay = self.decay(t);
        let shape = self.ln_shape(omega_max);
        let mut mass = CompensatedSum::new();
        let mut out = Vec::with_capacity(shape.len());
        for (k, ln_c) in shape.iter().enumerate() {
            let value = 1.0 - mass.value();
            out.push((self.omega0 + k as u64, self.tail_prediction(value)));
            mass.add((ln_c + decay).exp());
        }
        Ok(out)
    }

    fn tail_prediction(&self, value: f64) -> TailPrediction {
        let flag = if value < 0.0 {
            TailFlag::Negative
        } else if self.quality() == ApproxQuality::Unreliable {
            TailFlag::Unreliable
        } else {
            TailFlag::Ok
        };
        TailPrediction { value, flag }
    }
}
