use feedback_urn::analysis::tail_slope;
use feedback_urn::ctmc::{
    aggregate_losers, merge_jump_times, simulate_agent, simulate_batch, Caps, Outcome,
};
use feedback_urn::rng::substream;
use feedback_urn::tail::empirical_tail_counts;
use feedback_urn::FeedbackFunction;

fn pl(eta: f64, gamma: f64) -> FeedbackFunction {
    FeedbackFunction::power_law(eta, gamma).unwrap()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn holding_times_have_mean_one_over_rate() {
    let f = pl(1.0, 2.0);
    for omega0 in [1u64, 3, 10] {
        let caps = Caps::new(f64::INFINITY, omega0);
        let firsts: Vec<f64> = simulate_batch(&f, omega0, caps, 100_000, 131 + omega0, 0)
            .unwrap()
            .iter()
            .map(|e| e.final_time)
            .collect();
        let (mean, se) = mean_and_se(&firsts);
        let expected = 1.0 / f.evaluate(omega0).unwrap();
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "omega0 {omega0}: {mean} vs {expected}"
        );
    }
}

#[test]
fn time_to_pass_ten_balls() {
    let f = pl(1.0, 2.0);
    let expected: f64 = (1..=10).map(|w| 1.0 / (w * w) as f64).sum();
    assert!((expected - 1.5498).abs() < 1e-4);
    let times: Vec<f64> = simulate_batch(&f, 1, Caps::new(f64::INFINITY, 10), 100_000, 32, 0)
        .unwrap()
        .iter()
        .map(|e| e.final_time)
        .collect();
    let (mean, se) = mean_and_se(&times);
    assert!((mean - expected).abs() < 3.0 * se, "{mean} ± {se}");
}

#[test]
fn survival_past_the_time_cap() {
    let f = pl(1.0, 1.0);
    let n = 100_000;
    let ends = simulate_batch(&f, 1, Caps::new(2f64.ln(), u64::MAX), n, 33, 0).unwrap();
    let stayed = ends.iter().filter(|e| e.final_count == 1).count() as f64 / n as f64;
    let se = (0.25 / n as f64).sqrt();
    assert!((stayed - 0.5).abs() < 3.0 * se, "{stayed}");
    assert!(ends.iter().all(|e| e.outcome == Outcome::HitTimeCap));
}

#[test]
fn first_of_two_equal_agents_is_a_coin_flip() {
    let f = pl(1.0, 1.5);
    let n = 100_000u64;
    let mut first_is_zero = 0u64;
    for k in 0..n {
        let mut rng = substream(34, k);
        let caps = Caps::new(f64::INFINITY, 2);
        let a = simulate_agent(&f, 2, caps, &mut rng).unwrap();
        let b = simulate_agent(&f, 2, caps, &mut rng).unwrap();
        if merge_jump_times(&[a, b])[0].1 == 0 {
            first_is_zero += 1;
        }
    }
    let share = first_is_zero as f64 / n as f64;
    assert!(
        (share - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt(),
        "{share}"
    );
}

#[test]
fn tiny_time_cap_leaves_everyone_a_loser() {
    let sample = aggregate_losers(&pl(1.0, 2.0), 1, Caps::new(1e-4, 10_000), 2000, 35, 0).unwrap();
    assert_eq!(sample.n_exploded, 0);
    let ones = sample.counts.iter().filter(|&&c| c == 1).count();
    // P(jump before 1e-4) = 1e-4, so a handful at most
    assert!(ones >= 1990, "{ones}");
}

#[test]
fn loser_slope_for_gamma_one_point_six() {
    let f = pl(1.0, 1.6);
    let sample = aggregate_losers(&f, 1, Caps::new(1.0 / 0.6, 10_000), 10_000, 36, 0).unwrap();
    let slope = tail_slope(&empirical_tail_counts(&sample.counts).unwrap(), 10.0, 1e3).unwrap();
    assert!((slope + 0.6).abs() < 0.15, "{slope}");
}

#[test]
fn larger_gamma_explodes_more_by_time_one() {
    let caps = Caps::new(1.0, 10_000);
    let fast = aggregate_losers(&pl(1.0, 2.0), 1, caps, 5000, 37, 0).unwrap();
    let slow = aggregate_losers(&pl(1.0, 1.5), 1, caps, 5000, 37, 0).unwrap();
    assert!(fast.exploded_fraction() > slow.exploded_fraction());
}

#[test]
fn linear_feedback_stops_exploding_as_the_ball_cap_grows() {
    let f = pl(1.0, 1.0);
    let fractions: Vec<f64> = [1000u64, 10_000, 100_000]
        .iter()
        .map(|&cap| {
            aggregate_losers(&f, 1, Caps::new(8.0, cap), 2000, 38, 0)
                .unwrap()
                .exploded_fraction()
        })
        .collect();
    assert!(
        fractions[0] > fractions[1] && fractions[1] > fractions[2],
        "{fractions:?}"
    );
}

/// Shared substreams make a larger time cap extend the same paths, so each
/// agent's count (exploded agents counted past the ball cap) can only grow.
#[test]
fn feedback_tail_rises_with_time_cap() {
    let f = pl(1.0, 2.0);
    let grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let probe = [2.0, 10.0, 100.0, 1000.0];
    let mut previous = vec![0.0; probe.len()];
    for &t_max in &grid {
        let ends = simulate_batch(&f, 1, Caps::new(t_max, 10_000), 4000, 39, 0).unwrap();
        let counts: Vec<u64> = ends.iter().map(|e| e.final_count).collect();
        for (k, &w) in probe.iter().enumerate() {
            let tail =
                counts.iter().filter(|&&c| c as f64 >= w).count() as f64 / counts.len() as f64;
            assert!(tail >= previous[k], "t_M {t_max}, omega {w}");
            previous[k] = tail;
        }
    }
}

/// Removal of exploded agents can take mass out of the loser tail, so
/// monotonicity only holds up to sampling noise.
#[test]
fn loser_tail_rises_with_time_cap() {
    let f = pl(1.0, 2.0);
    let probe = [2.0, 10.0, 100.0];
    let mut previous = vec![0.0; probe.len()];
    for k in 1..=10 {
        let t_max = k as f64 / 10.0;
        let sample = aggregate_losers(&f, 1, Caps::new(t_max, 10_000), 4000, 40, 0).unwrap();
        let n = sample.n_losers() as f64;
        for (j, &w) in probe.iter().enumerate() {
            let tail = sample.counts.iter().filter(|&&c| c as f64 >= w).count() as f64 / n;
            let se = (tail * (1.0 - tail) / n).sqrt().max(1.0 / n);
            assert!(
                tail >= previous[j] - 3.0 * se,
                "t_M {t_max}, omega {w}: {tail} < {}",
                previous[j]
            );
            previous[j] = tail;
        }
    }
}
