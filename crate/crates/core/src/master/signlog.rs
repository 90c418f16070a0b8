//! Signed values stored as `(sign, ln|x|)` and compensated sums over them.

use serde::Serialize;

/// `sign · e^{log_abs}`; zero is `sign = 0` with `log_abs = -∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedLog {
    pub sign: i8,
    pub log_abs: f64,
}

impl SignedLog {
    pub const ZERO: Self = Self {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };
    pub const ONE: Self = Self {
        sign: 1,
        log_abs: 0.0,
    };

    pub fn new(sign: i8, log_abs: f64) -> Self {
        if sign == 0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                sign: sign.signum(),
                log_abs,
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::new(if x > 0.0 { 1 } else { -1 }, x.abs().ln())
        }
    }

    /// Plain float; may overflow to ±∞ or underflow to 0.
    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_abs.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Multiply by `sign · e^{log_factor}`.
    pub fn scale(self, sign: i8, log_factor: f64) -> Self {
        Self::new(self.sign * sign, self.log_abs + log_factor)
    }
}

impl std::ops::Neg for SignedLog {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            log_abs: self.log_abs,
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }

    /// Leading part and the rounding carried alongside it.
    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.carry)
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Result of a signed sum, with the size of its largest summand so callers
/// can judge how much cancellation occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedSum {
    pub value: SignedLog,
    /// `ln` of the largest |summand|; `-∞` for an empty or all-zero sum.
    pub max_log_abs: f64,
}

impl SignedSum {
    /// `max |summand| / |result|` (∞ when the result cancels to zero).
    pub fn cancellation_ratio(&self) -> f64 {
        if self.max_log_abs == f64::NEG_INFINITY {
            return 1.0;
        }
        if self.value.is_zero() {
            return f64::INFINITY;
        }
        (self.max_log_abs - self.value.log_abs).exp()
    }
}

/// Sum of signed-log terms. Terms are scaled by the largest magnitude,
/// positives and negatives are each summed smallest-first with compensation,
/// and the two group totals are differenced last.
pub fn signed_sum(terms: &[SignedLog]) -> SignedSum {
    let max_log_abs = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.log_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_log_abs == f64::NEG_INFINITY {
        return SignedSum {
            value: SignedLog::ZERO,
            max_log_abs,
        };
    }
    let mut pos: Vec<f64> = Vec::new();
    let mut neg: Vec<f64> = Vec::new();
    for t in terms.iter().filter(|t| !t.is_zero()) {
        let scaled = (t.log_abs - max_log_abs).exp();
        if t.sign > 0 {
            pos.push(scaled);
        } else {
            neg.push(scaled);
        }
    }
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);
    let p: CompensatedSum = pos.into_iter().collect();
    let n: CompensatedSum = neg.into_iter().collect();
    let (ph, pl) = p.parts();
    let (nh, nl) = n.parts();
    let mut diff = CompensatedSum::new();
    diff.add(ph);
    diff.add(-nh);
    diff.add(pl);
    diff.add(-nl);
    let d = diff.value();
    let value = SignedLog::from_f64(d).scale(1, max_log_abs);
    SignedSum { value, max_log_abs }
}
