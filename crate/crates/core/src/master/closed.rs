//! Closed-form transient mass functions for constant and linear feedback.

use super::signlog::CompensatedSum;
use crate::error::{Error, Result};

pub(crate) fn ln_factorial(n: u64) -> f64 {
    (2..=n)
        .map(|k| (k as f64).ln())
        .collect::<CompensatedSum>()
        .value()
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn check(eta: f64, t: f64, omega: u64, omega0: u64) -> Result<u64> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eta must be positive, got {eta}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    if omega0 == 0 {
        return Err(Error::Domain("omega0 must be at least 1".into()));
    }
    omega
        .checked_sub(omega0)
        .ok_or_else(|| Error::Domain(format!("omega {omega} is below omega0 {omega0}")))
}

/// `f ≡ η`: Poisson, `(ηt)^{ω−ω0} e^{−ηt} / (ω−ω0)!`.
pub fn closed_form_poisson(eta: f64, t: f64, omega: u64, omega0: u64) -> Result<f64> {
    let k = check(eta, t, omega, omega0)?;
    let rate_t = eta * t;
    if rate_t == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    Ok((k as f64 * rate_t.ln() - rate_t - ln_factorial(k)).exp())
}

/// `f(ω) = ηω`: negative binomial (Yule),
/// `C(ω−1, ω−ω0) (1−e^{−ηt})^{ω−ω0} e^{−ηω0t}`.
pub fn closed_form_negbin(eta: f64, t: f64, omega: u64, omega0: u64) -> Result<f64> {
    let k = check(eta, t, omega, omega0)?;
    let rate_t = eta * t;
    if rate_t == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let ln_success = (-(-rate_t).exp_m1()).ln();
    Ok((ln_binomial(omega - 1, k) + k as f64 * ln_success - rate_t * omega0 as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_values() {
        let e1 = (-1.0f64).exp();
        assert!((closed_form_poisson(1.0, 1.0, 3, 3).unwrap() - e1).abs() < 1e-15);
        assert!((closed_form_poisson(2.0, 0.5, 4, 3).unwrap() - e1).abs() < 1e-15);
        assert_eq!(closed_form_poisson(1.0, 0.0, 1, 1).unwrap(), 1.0);
        assert_eq!(closed_form_poisson(1.0, 0.0, 2, 1).unwrap(), 0.0);
    }

    #[test]
    fn poisson_normalises() {
        let total: f64 = (2..200)
            .map(|w| closed_form_poisson(1.7, 3.0, w, 2).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn negbin_values() {
        assert!((closed_form_negbin(1.0, 2f64.ln(), 4, 1).unwrap() - 0.0625).abs() < 1e-15);
        assert_eq!(closed_form_negbin(1.3, 0.0, 2, 2).unwrap(), 1.0);
        // ω0 = 1 is geometric with success probability e^{−ηt}
        let (eta, t) = (0.8f64, 1.1);
        let q = (-eta * t).exp();
        for w in 1..20u64 {
            let geo = q * (1.0 - q).powi(w as i32 - 1);
            assert!((closed_form_negbin(eta, t, w, 1).unwrap() - geo).abs() < 1e-14);
        }
        let total: f64 = (3..2000)
            .map(|w| closed_form_negbin(1.0, 0.7, w, 3).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn preconditions() {
        assert!(closed_form_poisson(1.0, 1.0, 1, 2).is_err());
        assert!(closed_form_poisson(0.0, 1.0, 2, 2).is_err());
        assert!(closed_form_negbin(1.0, -1.0, 2, 2).is_err());
    }
}
