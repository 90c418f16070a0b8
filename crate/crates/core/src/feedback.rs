//! Feedback functions `f(ω)` and the facts that follow from them alone:
//! which long-run regime the balls-in-bins process falls into and how long
//! an agent takes, in expectation, to explode.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power-law feedback `f(ω) = η ω^γ` with `η > 0`, `γ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLaw {
    eta: f64,
    gamma: f64,
}

impl PowerLaw {
    pub fn new(eta: f64, gamma: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must be positive and finite, got {eta}"
            )));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be nonnegative and finite, got {gamma}"
            )));
        }
        Ok(Self { eta, gamma })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Feedback given as an explicit table `f(ω_min), f(ω_min + 1), …`.
///
/// Evaluating outside the table is a domain error; there is no extension rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tabulated {
    omega_min: u64,
    values: Vec<f64>,
}

impl Tabulated {
    pub fn new(omega_min: u64, values: Vec<f64>) -> Result<Self> {
        if omega_min == 0 {
            return Err(Error::InvalidParameter(
                "omega_min must be at least 1".into(),
            ));
        }
        if values.is_empty() {
            return Err(Error::InvalidParameter("feedback table is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "feedback table entries must be positive and finite, got {bad}"
            )));
        }
        Ok(Self { omega_min, values })
    }

    pub fn omega_min(&self) -> u64 {
        self.omega_min
    }

    /// Largest ω covered by the table.
    pub fn omega_max(&self) -> u64 {
        self.omega_min + self.values.len() as u64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A positive feedback rule `f: ℕ → ℝ_{>0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeedbackFunction {
    PowerLaw(PowerLaw),
    Tabulated(Tabulated),
}

impl FeedbackFunction {
    pub fn power_law(eta: f64, gamma: f64) -> Result<Self> {
        PowerLaw::new(eta, gamma).map(Self::PowerLaw)
    }

    pub fn tabulated(omega_min: u64, values: Vec<f64>) -> Result<Self> {
        Tabulated::new(omega_min, values).map(Self::Tabulated)
    }

    pub fn as_power_law(&self) -> Option<&PowerLaw> {
        match self {
            Self::PowerLaw(p) => Some(p),
            Self::Tabulated(_) => None,
        }
    }

    /// Smallest ω at which `f` is defined.
    pub fn domain_start(&self) -> u64 {
        match self {
            Self::PowerLaw(_) => 1,
            Self::Tabulated(t) => t.omega_min,
        }
    }

    /// Largest ω at which `f` is defined, `None` when unbounded.
    pub fn domain_end(&self) -> Option<u64> {
        match self {
            Self::PowerLaw(_) => None,
            Self::Tabulated(t) => Some(t.omega_max()),
        }
    }

    pub fn evaluate(&self, omega: u64) -> Result<f64> {
        match self {
            Self::PowerLaw(p) => {
                if omega == 0 {
                    return Err(Error::Domain("feedback is defined for omega >= 1".into()));
                }
                Ok(p.eta * (omega as f64).powf(p.gamma))
            }
            Self::Tabulated(t) => t.lookup(omega),
        }
    }

    /// `ln f(ω)`, finite even where `f(ω)` itself would overflow.
    pub fn ln_evaluate(&self, omega: u64) -> Result<f64> {
        match self {
            Self::PowerLaw(p) => {
                if omega == 0 {
                    return Err(Error::Domain("feedback is defined for omega >= 1".into()));
                }
                Ok(p.eta.ln() + p.gamma * (omega as f64).ln())
            }
            Self::Tabulated(t) => t.lookup(omega).map(f64::ln),
        }
    }

    /// `f(hi) − f(lo)` without the cancellation of a plain subtraction when
    /// the two values are close (power law only; tables subtract directly).
    pub fn difference(&self, hi: u64, lo: u64) -> Result<f64> {
        match self {
            Self::PowerLaw(p) => {
                let f_hi = self.evaluate(hi)?;
                self.evaluate(lo)?;
                if hi == lo || p.gamma == 0.0 {
                    return Ok(0.0);
                }
                let ratio_ln = (lo as f64 / hi as f64).ln();
                Ok(-f_hi * (p.gamma * ratio_ln).exp_m1())
            }
            Self::Tabulated(_) => Ok(self.evaluate(hi)? - self.evaluate(lo)?),
        }
    }

    /// Long-run behaviour of the feedback model under this rule.
    pub fn classify_regime(&self) -> Result<RegimeLabel> {
        match self {
            Self::PowerLaw(p) => Ok(if p.gamma > 1.0 {
                RegimeLabel::Monopoly
            } else if p.gamma > 0.5 {
                RegimeLabel::FixedRankingsNoMonopoly
            } else {
                RegimeLabel::NoFixedRankings
            }),
            Self::Tabulated(_) => Err(Error::UnsupportedClassification),
        }
    }

    /// Integral-test bounds on the expected explosion time from `ω0`.
    pub fn explosion_time_bounds(&self, omega0: u64) -> Result<ExplosionBounds> {
        let p = self.as_power_law().ok_or_else(|| {
            Error::InvalidParameter("explosion-time bounds require power-law feedback".into())
        })?;
        if omega0 == 0 {
            return Err(Error::Domain("omega0 must be at least 1".into()));
        }
        if p.gamma <= 1.0 {
            return Err(Error::NonExplosive { gamma: p.gamma });
        }
        let w0 = omega0 as f64;
        let lower = 1.0 / (p.eta * w0.powf(p.gamma - 1.0) * (p.gamma - 1.0));
        let upper = lower + 1.0 / (p.eta * w0.powf(p.gamma));
        Ok(ExplosionBounds { lower, upper })
    }
}

impl Tabulated {
    fn lookup(&self, omega: u64) -> Result<f64> {
        omega
            .checked_sub(self.omega_min)
            .and_then(|k| self.values.get(k as usize))
            .copied()
            .ok_or_else(|| {
                Error::Domain(format!(
                    "omega {omega} outside tabulated range [{}, {}]",
                    self.omega_min,
                    self.omega_max()
                ))
            })
    }
}

/// The three mutually exclusive long-run regimes of the feedback model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// `Σ 1/f < ∞`: one agent eventually takes every ball.
    Monopoly,
    /// `Σ 1/f = ∞` but `Σ 1/f² < ∞`.
    FixedRankingsNoMonopoly,
    /// `Σ 1/f² = ∞`.
    NoFixedRankings,
}

/// Bounds `t_γ ≤ E[T] ≤ t_γ + 1/(η ω0^γ)` on the expected explosion time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplosionBounds {
    /// `t_γ`.
    pub lower: f64,
    pub upper: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(eta: f64, gamma: f64) -> FeedbackFunction {
        FeedbackFunction::power_law(eta, gamma).unwrap()
    }

    #[test]
    fn evaluates_power_law() {
        assert_eq!(pl(1.0, 2.0).evaluate(3).unwrap(), 9.0);
        assert_eq!(pl(1.0, 0.0).evaluate(17).unwrap(), 1.0);
        let v = pl(2.0, 1.5).evaluate(4).unwrap();
        assert!((v - 16.0).abs() <= 16.0 * 1e-15, "{v}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FeedbackFunction::power_law(0.0, 1.0).is_err());
        assert!(FeedbackFunction::power_law(1.0, -0.1).is_err());
        assert!(FeedbackFunction::power_law(f64::NAN, 1.0).is_err());
        assert!(FeedbackFunction::tabulated(1, vec![]).is_err());
        assert!(FeedbackFunction::tabulated(1, vec![1.0, 0.0]).is_err());
        assert!(FeedbackFunction::tabulated(0, vec![1.0]).is_err());
    }

    #[test]
    fn tabulated_domain() {
        let f = FeedbackFunction::tabulated(3, vec![1.0, 2.5, 4.0]).unwrap();
        assert_eq!(f.evaluate(3).unwrap(), 1.0);
        assert_eq!(f.evaluate(5).unwrap(), 4.0);
        assert!(matches!(f.evaluate(2), Err(Error::Domain(_))));
        assert!(matches!(f.evaluate(6), Err(Error::Domain(_))));
        assert_eq!(f.domain_end(), Some(5));
    }

    #[test]
    fn classifies_regimes() {
        assert_eq!(
            pl(1.0, 1.3).classify_regime().unwrap(),
            RegimeLabel::Monopoly
        );
        assert_eq!(
            pl(1.0, 1.0).classify_regime().unwrap(),
            RegimeLabel::FixedRankingsNoMonopoly
        );
        assert_eq!(
            pl(5.0, 0.5).classify_regime().unwrap(),
            RegimeLabel::NoFixedRankings
        );
        assert_eq!(
            pl(1.0, 0.0).classify_regime().unwrap(),
            RegimeLabel::NoFixedRankings
        );
        let table = FeedbackFunction::tabulated(1, vec![1.0, 2.0]).unwrap();
        assert_eq!(
            table.classify_regime(),
            Err(Error::UnsupportedClassification)
        );
    }

    #[test]
    fn explosion_bounds() {
        let b = pl(1.0, 2.0).explosion_time_bounds(1).unwrap();
        assert_eq!(b.lower, 1.0);
        assert_eq!(b.upper, 2.0);
        let b = pl(1.0, 1.2).explosion_time_bounds(1).unwrap();
        assert!((b.lower - 5.0).abs() < 1e-12);
        assert!(matches!(
            pl(1.0, 1.0).explosion_time_bounds(1),
            Err(Error::NonExplosive { .. })
        ));
    }

    #[test]
    fn explosion_lower_bound_decreases_in_gamma() {
        let mut prev = f64::INFINITY;
        for k in 1..=200 {
            let gamma = 1.0 + 2.0 * k as f64 / 200.0;
            let b = pl(1.0, gamma).explosion_time_bounds(1).unwrap();
            assert!(b.lower < b.upper);
            assert!(b.lower < prev);
            prev = b.lower;
        }
    }

    #[test]
    fn difference_matches_subtraction() {
        let f = pl(1.5, 1.4);
        for (hi, lo) in [(2, 1), (300, 299), (10, 3), (4, 9)] {
            let direct = f.evaluate(hi).unwrap() - f.evaluate(lo).unwrap();
            let d = f.difference(hi, lo).unwrap();
            assert!(
                (d - direct).abs() <= 1e-12 * direct.abs(),
                "{hi} {lo}: {d} vs {direct}"
            );
        }
        assert_eq!(pl(1.0, 0.0).difference(5, 2).unwrap(), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn evaluate_is_positive(eta in 1e-3f64..1e3, gamma in 0.0f64..4.0, omega in 1u64..1_000_000) {
                prop_assert!(pl(eta, gamma).evaluate(omega).unwrap() > 0.0);
            }

            #[test]
            fn regime_ignores_eta(eta_a in 1e-3f64..1e3, eta_b in 1e-3f64..1e3, gamma in 0.0f64..3.0) {
                prop_assert_eq!(
                    pl(eta_a, gamma).classify_regime().unwrap(),
                    pl(eta_b, gamma).classify_regime().unwrap()
                );
            }
        }
    }
}
