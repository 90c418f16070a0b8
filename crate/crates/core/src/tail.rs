//! Tail curves `ω ↦ P(X ≥ ω)`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSource {
    Empirical,
    Predicted,
}

/// Nonincreasing map from strictly increasing ω to a tail probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCurve {
    points: Vec<(f64, f64)>,
    source: TailSource,
}

impl TailCurve {
    /// Build a curve, checking ω is strictly increasing, probabilities are
    /// nonincreasing and the first is at most 1. Empirical curves must also
    /// be strictly positive.
    pub fn new(points: Vec<(f64, f64)>, source: TailSource) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("tail curve has no points".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter(
                    "tail omegas must be strictly increasing".into(),
                ));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::InvalidParameter(
                    "tail probabilities must be nonincreasing".into(),
                ));
            }
        }
        if points[0].1 > 1.0 {
            return Err(Error::InvalidParameter("tail probability exceeds 1".into()));
        }
        if source == TailSource::Empirical && points.iter().any(|p| !(p.1 > 0.0)) {
            return Err(Error::InvalidParameter(
                "empirical tail probabilities must be positive".into(),
            ));
        }
        Ok(Self { points, source })
    }

    /// Predicted curve without the monotonicity check; analytic predictions
    /// can go negative or wiggle where the approximation fails.
    pub fn predicted_unchecked(points: Vec<(f64, f64)>) -> Self {
        Self {
            points,
            source: TailSource::Predicted,
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn source(&self) -> TailSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Right-continuous step value: the probability at the largest stored
    /// ω not exceeding `omega`. `None` left of the first point.
    pub fn step_value(&self, omega: f64) -> Option<f64> {
        let idx = self.points.partition_point(|p| p.0 <= omega);
        idx.checked_sub(1).map(|i| self.points[i].1)
    }

    /// CSV with header `omega,tail_prob`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,tail_prob\n");
        for (w, p) in &self.points {
            out.push_str(&format!("{w},{p}\n"));
        }
        out
    }
}

/// Empirical tail `#{i : x_i ≥ ω} / n` on the sorted distinct sample values.
pub fn empirical_tail<T: Copy + Into<f64>>(samples: &[T]) -> Result<TailCurve> {
    if samples.is_empty() {
        return Err(Error::Domain("empirical tail of an empty sample".into()));
    }
    let mut values: Vec<f64> = samples.iter().map(|&x| x.into()).collect();
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("sample contains NaN".into()));
    }
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mut points = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let v = values[i];
        points.push((v, (values.len() - i) as f64 / n));
        while i < values.len() && values[i] == v {
            i += 1;
        }
    }
    TailCurve::new(points, TailSource::Empirical)
}

/// Empirical tail of integer counts.
pub fn empirical_tail_counts(counts: &[u64]) -> Result<TailCurve> {
    let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    empirical_tail(&as_f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_counted_tails() {
        assert_eq!(empirical_tail_counts(&[5]).unwrap().points(), &[(5.0, 1.0)]);
        assert_eq!(
            empirical_tail_counts(&[1, 1, 2, 4]).unwrap().points(),
            &[(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)]
        );
        assert_eq!(
            empirical_tail_counts(&[3, 3, 3]).unwrap().points(),
            &[(3.0, 1.0)]
        );
        assert!(matches!(empirical_tail_counts(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn step_interpolation() {
        let c = empirical_tail_counts(&[1, 1, 2, 4]).unwrap();
        assert_eq!(c.step_value(0.5), None);
        assert_eq!(c.step_value(1.0), Some(1.0));
        assert_eq!(c.step_value(3.9), Some(0.5));
        assert_eq!(c.step_value(100.0), Some(0.25));
    }

    #[test]
    fn rejects_malformed_curves() {
        assert!(TailCurve::new(vec![(1.0, 0.5), (1.0, 0.4)], TailSource::Predicted).is_err());
        assert!(TailCurve::new(vec![(1.0, 0.5), (2.0, 0.6)], TailSource::Predicted).is_err());
        assert!(TailCurve::new(vec![(1.0, 1.5)], TailSource::Predicted).is_err());
        assert!(TailCurve::new(vec![(1.0, 0.0)], TailSource::Empirical).is_err());
    }

    #[test]
    fn csv_uses_shortest_round_trip() {
        let c = empirical_tail_counts(&[1, 2, 2]).unwrap();
        assert_eq!(c.to_csv(), "omega,tail_prob\n1,1\n2,0.6666666666666666\n");
    }

    proptest! {
        #[test]
        fn empirical_tail_is_a_valid_curve(counts in prop::collection::vec(1u64..50, 1..200)) {
            let c = empirical_tail_counts(&counts).unwrap();
            let min = *counts.iter().min().unwrap() as f64;
            prop_assert_eq!(c.points()[0], (min, 1.0));
            for &(w, p) in c.points() {
                let expect = counts.iter().filter(|&&x| x as f64 >= w).count() as f64 / counts.len() as f64;
                prop_assert_eq!(p, expect);
            }
        }
    }
}
