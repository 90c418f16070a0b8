//! Severo recursion for the single-agent master equation.
//!
//! For distinct feedback values the mass function from `W_0 = ω0` is
//! `p_t(ω) = Σ_{i=ω0}^{ω} a_{ω,i} e^{−f(i)t}` with `a_{ω0,ω0} = 1`,
//! `a_{ω,i} = f(ω−1)/(f(ω)−f(i)) · a_{ω−1,i}` for `i < ω` and
//! `a_{ω,ω} = −Σ_{i<ω} a_{ω,i}`.
//!
//! The coefficients alternate in sign and grow quickly, so they are kept as
//! `(sign, ln|a|)`. Each column's log-magnitude is a compensated running sum
//! of the per-row log factors.

use serde::Serialize;

use super::signlog::{signed_sum, CompensatedSum, SignedLog};
use crate::error::{Error, Result};
use crate::feedback::FeedbackFunction;

/// `|p|` beyond `[−PLAUSIBLE_SLACK, 1 + PLAUSIBLE_SLACK]` is flagged.
pub const PLAUSIBLE_SLACK: f64 = 1e-6;
/// Largest tolerated `max |summand| / |p|`.
pub const MAX_CANCELLATION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfFlag {
    Ok,
    /// Cancellation or an implausible value: the number is not trustworthy.
    Breakdown,
}

impl PmfFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Breakdown => "breakdown",
        }
    }
}

/// A mass-function value together with how far it can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PmfValue {
    pub p: f64,
    pub flag: PmfFlag,
    /// `max |summand| / |p|`.
    pub cancellation: f64,
}

/// Triangular table of `a_{ω,i}`, `ω0 ≤ i ≤ ω ≤ ω_max`.
#[derive(Debug, Clone)]
pub struct MasterSolution {
    omega0: u64,
    omega_max: u64,
    feedback: FeedbackFunction,
    /// `f(i)` for `i = ω0..=ω_max`.
    rates: Vec<f64>,
    /// `rows[ω − ω0][i − ω0]`.
    rows: Vec<Vec<SignedLog>>,
}

impl MasterSolution {
    /// Build the coefficient table up to `omega_max`.
    pub fn solve(feedback: &FeedbackFunction, omega0: u64, omega_max: u64) -> Result<Self> {
        if omega0 < feedback.domain_start() {
            return Err(Error::Domain(format!(
                "omega0 = {omega0} is outside the feedback domain"
            )));
        }
        if omega_max < omega0 {
            return Err(Error::Domain(format!(
                "omega_max = {omega_max} is below omega0 = {omega0}"
            )));
        }
        let size = (omega_max - omega0 + 1) as usize;
        let rates = (omega0..=omega_max)
            .map(|w| feedback.evaluate(w))
            .collect::<Result<Vec<_>>>()?;
        let ln_rates: Vec<f64> = rates.iter().map(|r| r.ln()).collect();

        let mut rows: Vec<Vec<SignedLog>> = Vec::with_capacity(size);
        rows.push(vec![SignedLog::ONE]);
        let mut col_sign: Vec<i8> = vec![1];
        let mut col_log: Vec<CompensatedSum> = vec![CompensatedSum::new()];

        for k in 1..size {
            let omega = omega0 + k as u64;
            let mut row = Vec::with_capacity(k + 1);
            for i in 0..k {
                let diff = feedback.difference(omega, omega0 + i as u64)?;
                if diff == 0.0 {
                    return Err(Error::TiedFeedback {
                        lo: omega0 + i as u64,
                        hi: omega,
                    });
                }
                col_log[i].add(ln_rates[k - 1] - diff.abs().ln());
                if diff < 0.0 {
                    col_sign[i] = -col_sign[i];
                }
                row.push(SignedLog::new(col_sign[i], col_log[i].value()));
            }
            let diagonal = -signed_sum(&row).value;
            if diagonal.is_zero() {
                return Err(Error::Domain(format!(
                    "diagonal coefficient a({omega},{omega}) cancelled to zero"
                )));
            }
            col_sign.push(diagonal.sign);
            let mut start = CompensatedSum::new();
            start.add(diagonal.log_abs);
            col_log.push(start);
            row.push(diagonal);
            rows.push(row);
        }

        Ok(Self {
            omega0,
            omega_max,
            feedback: feedback.clone(),
            rates,
            rows,
        })
    }

    pub fn omega0(&self) -> u64 {
        self.omega0
    }

    pub fn omega_max(&self) -> u64 {
        self.omega_max
    }

    pub fn feedback(&self) -> &FeedbackFunction {
        &self.feedback
    }

    /// `a_{ω,i}`.
    pub fn coefficient(&self, omega: u64, i: u64) -> Result<SignedLog> {
        self.check_omega(omega)?;
        if i < self.omega0 || i > omega {
            return Err(Error::Domain(format!(
                "coefficient index i = {i} outside [omega0, omega]"
            )));
        }
        Ok(self.rows[(omega - self.omega0) as usize][(i - self.omega0) as usize])
    }

    /// Row `ω` of the table, `a_{ω,ω0}, …, a_{ω,ω}`.
    pub fn row(&self, omega: u64) -> Result<&[SignedLog]> {
        self.check_omega(omega)?;
        Ok(&self.rows[(omega - self.omega0) as usize])
    }

    fn check_omega(&self, omega: u64) -> Result<()> {
        if omega < self.omega0 || omega > self.omega_max {
            return Err(Error::Domain(format!(
                "omega = {omega} outside solved range [{}, {}]",
                self.omega0, self.omega_max
            )));
        }
        Ok(())
    }

    /// `p_t(ω)`, flagged when cancellation leaves it untrustworthy.
    pub fn mass_function(&self, t: f64, omega: u64) -> Result<PmfValue> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
        }
        let row = self.row(omega)?;
        let terms: Vec<SignedLog> = row
            .iter()
            .zip(&self.rates)
            .map(|(a, &rate)| a.scale(1, -rate * t))
            .collect();
        let sum = signed_sum(&terms);
        let p = sum.value.to_f64();
        let cancellation = sum.cancellation_ratio();
        let implausible = !(-PLAUSIBLE_SLACK..=1.0 + PLAUSIBLE_SLACK).contains(&p);
        let flag = if implausible || cancellation > MAX_CANCELLATION {
            PmfFlag::Breakdown
        } else {
            PmfFlag::Ok
        };
        Ok(PmfValue {
            p,
            flag,
            cancellation,
        })
    }

    /// CSV with header `omega,i,sign,log_abs`.
    pub fn coefficients_csv(&self) -> String {
        let mut out = String::from("omega,i,sign,log_abs\n");
        for (k, row) in self.rows.iter().enumerate() {
            let omega = self.omega0 + k as u64;
            for (m, a) in row.iter().enumerate() {
                out.push_str(&format!(
                    "{omega},{},{},{}\n",
                    self.omega0 + m as u64,
                    a.sign,
                    a.log_abs
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::closed::ln_factorial;
    use proptest::prelude::*;

    fn pl(eta: f64, gamma: f64) -> FeedbackFunction {
        FeedbackFunction::power_law(eta, gamma).unwrap()
    }

    #[test]
    fn linear_feedback_second_row() {
        let sol = MasterSolution::solve(&pl(1.0, 1.0), 1, 2).unwrap();
        let a21 = sol.coefficient(2, 1).unwrap().to_f64();
        let a22 = sol.coefficient(2, 2).unwrap().to_f64();
        assert!((a21 - 1.0).abs() < 1e-15);
        assert!((a22 + 1.0).abs() < 1e-15);
        let t = 0.37;
        let p = sol.mass_function(t, 2).unwrap().p;
        assert!((p - ((-t).exp() - (-2.0 * t).exp())).abs() < 1e-15);
    }

    /// `a_{ω,i} = C(ω−1, ω−ω0) C(ω−ω0, i−ω0) (−1)^{i−ω0}` for linear feedback.
    #[test]
    fn linear_feedback_matches_binomial_coefficients() {
        for omega0 in [1u64, 3] {
            let sol = MasterSolution::solve(&pl(1.0, 1.0), omega0, omega0 + 11).unwrap();
            for omega in omega0..=omega0 + 11 {
                let k = omega - omega0;
                for i in omega0..=omega {
                    let m = i - omega0;
                    let ln_mag =
                        ln_factorial(omega - 1) - ln_factorial(k) - ln_factorial(omega0 - 1)
                            + ln_factorial(k)
                            - ln_factorial(m)
                            - ln_factorial(k - m);
                    let expected = if m % 2 == 0 { 1.0 } else { -1.0 } * ln_mag.exp();
                    let got = sol.coefficient(omega, i).unwrap().to_f64();
                    assert!(
                        (got - expected).abs() <= 1e-9 * expected.abs(),
                        "a({omega},{i}) = {got}, expected {expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn first_state_decays_exponentially() {
        let f = pl(1.3, 1.7);
        let sol = MasterSolution::solve(&f, 2, 10).unwrap();
        for t in [0.0, 0.4, 3.0] {
            let p = sol.mass_function(t, 2).unwrap().p;
            assert!((p - (-f.evaluate(2).unwrap() * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn geometric_at_half() {
        let sol = MasterSolution::solve(&pl(1.0, 1.0), 1, 5).unwrap();
        let p = sol.mass_function(2f64.ln(), 3).unwrap();
        assert!((p.p - 0.125).abs() < 1e-14);
        assert_eq!(p.flag, PmfFlag::Ok);
    }

    #[test]
    fn initial_condition() {
        let sol = MasterSolution::solve(&pl(1.0, 1.4), 1, 200).unwrap();
        assert_eq!(sol.mass_function(0.0, 1).unwrap().p, 1.0);
        for omega in 2..=200 {
            let max = sol
                .row(omega)
                .unwrap()
                .iter()
                .map(|a| a.log_abs)
                .fold(f64::NEG_INFINITY, f64::max)
                .exp();
            let p = sol.mass_function(0.0, omega).unwrap().p;
            assert!(p.abs() <= 1e-8 * max, "p_0({omega}) = {p}");
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            MasterSolution::solve(&pl(1.0, 0.0), 1, 3),
            Err(Error::TiedFeedback { lo: 1, hi: 2 })
        ));
        assert!(MasterSolution::solve(&pl(1.0, 1.0), 4, 3).is_err());
        let table = FeedbackFunction::tabulated(1, vec![1.0, 2.0, 1.0]).unwrap();
        assert!(matches!(
            MasterSolution::solve(&table, 1, 3),
            Err(Error::TiedFeedback { lo: 1, hi: 3 })
        ));
        let sol = MasterSolution::solve(&pl(1.0, 1.0), 2, 5).unwrap();
        assert!(sol.mass_function(1.0, 1).is_err());
        assert!(sol.mass_function(1.0, 6).is_err());
        assert!(sol.mass_function(-1.0, 3).is_err());
        assert!(sol.coefficient(4, 5).is_err());
    }

    /// Non-monotone tabulated feedback produces negative differences; the
    /// recursion must still solve the master equation.
    #[test]
    fn tabulated_feedback_satisfies_master_equation() {
        let table = FeedbackFunction::tabulated(1, vec![2.0, 0.5, 3.0, 1.2, 4.0]).unwrap();
        let sol = MasterSolution::solve(&table, 1, 5).unwrap();
        let rates = [2.0, 0.5, 3.0, 1.2, 4.0];
        // check dp/dt = f(ω−1)p(ω−1) − f(ω)p(ω) by central differences
        let t = 0.8;
        let h = 1e-5;
        for omega in 2..=5u64 {
            let p = |s: f64, w: u64| sol.mass_function(s, w).unwrap().p;
            let lhs = (p(t + h, omega) - p(t - h, omega)) / (2.0 * h);
            let k = (omega - 1) as usize;
            let rhs = rates[k - 1] * p(t, omega - 1) - rates[k] * p(t, omega);
            assert!((lhs - rhs).abs() < 1e-8, "omega {omega}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn coefficient_dump() {
        let sol = MasterSolution::solve(&pl(1.0, 1.0), 1, 2).unwrap();
        let csv = sol.coefficients_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "omega,i,sign,log_abs");
        assert_eq!(lines[1], "1,1,1,0");
        assert!(lines[3].starts_with("2,2,-1,"));
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn breakdown_is_flagged() {
        // γ = 1.2 at small t: summands reach ~1e12 while p is ~1e-36
        let sol = MasterSolution::solve(&pl(1.0, 1.2), 1, 200).unwrap();
        let v = sol.mass_function(0.5, 200).unwrap();
        assert_eq!(v.flag, PmfFlag::Breakdown);
        let v = sol.mass_function(3.0, 20).unwrap();
        assert_eq!(v.flag, PmfFlag::Ok);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn recursion_identity(gamma in 0.6f64..2.5, omega0 in 1u64..4, omega_off in 1u64..40, i_off in 0u64..40) {
            let f = pl(1.0, gamma);
            let omega = omega0 + omega_off;
            let i = omega0 + i_off % omega_off;
            let sol = MasterSolution::solve(&f, omega0, omega).unwrap();
            let a = sol.coefficient(omega, i).unwrap();
            let prev = sol.coefficient(omega - 1, i).unwrap();
            // a_{ω,i}(f(ω) − f(i)) = f(ω−1) a_{ω−1,i}
            let lhs = a.log_abs + f.difference(omega, i).unwrap().ln();
            let rhs = prev.log_abs + f.ln_evaluate(omega - 1).unwrap();
            prop_assert_eq!(a.sign, prev.sign);
            prop_assert!((lhs - rhs).abs() < 1e-12, "{} vs {}", lhs, rhs);
        }
    }
}
