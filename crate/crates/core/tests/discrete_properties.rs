use statrs::distribution::{ChiSquared, ContinuousCDF};

use feedback_urn::analysis::fit_exponential;
use feedback_urn::discrete::{run, run_replica, SimConfig};
use feedback_urn::FeedbackFunction;

fn pl(gamma: f64) -> FeedbackFunction {
    FeedbackFunction::power_law(1.0, gamma).unwrap()
}

/// Exact law of agent 1's count after `steps` draws for two agents
/// starting at one ball each.
fn two_agent_law(gamma: f64, steps: usize) -> Vec<f64> {
    // law[a] = P(agent 1 holds a balls)
    let mut law = vec![0.0; steps + 2];
    law[1] = 1.0;
    for n in 0..steps {
        let total = n as u64 + 2;
        let mut next = vec![0.0; steps + 2];
        for a in 1..=(n + 1) {
            if law[a] == 0.0 {
                continue;
            }
            let (fa, fb) = (
                (a as f64).powf(gamma),
                ((total - a as u64) as f64).powf(gamma),
            );
            let up = fa / (fa + fb);
            next[a + 1] += law[a] * up;
            next[a] += law[a] * (1.0 - up);
        }
        law = next;
    }
    law
}

#[test]
fn two_agents_match_the_exact_law() {
    let (gamma, steps, runs) = (2.0, 10usize, 100_000u64);
    let law = two_agent_law(gamma, steps);
    assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-14);

    let config = SimConfig::new(2, pl(gamma), vec![steps as u64], 606);
    let mut observed = vec![0u64; steps + 2];
    for r in 0..runs {
        let snapshot = &run_replica(&config, r).unwrap()[0];
        assert_eq!(snapshot.counts.iter().sum::<u64>(), steps as u64 + 2);
        observed[snapshot.counts[0] as usize] += 1;
    }

    let mut chi2 = 0.0;
    let mut cells = 0;
    for a in 1..=steps + 1 {
        let expected = law[a] * runs as f64;
        assert!(expected >= 5.0, "cell {a} too sparse for chi-square");
        chi2 += (observed[a] as f64 - expected).powi(2) / expected;
        cells += 1;
    }
    let critical = ChiSquared::new((cells - 1) as f64)
        .unwrap()
        .inverse_cdf(0.999);
    assert!(chi2 < critical, "chi2 {chi2} vs {critical}");
}

/// Linear feedback from one ball each is a Pólya urn, so shares are
/// uniform on the simplex and counts are close to exponential.
#[test]
fn linear_feedback_counts_are_near_exponential() {
    let n_agents = 1000usize;
    let steps = 1_000_000u64;
    let config = SimConfig::new(n_agents, pl(1.0), vec![steps], 2024);
    let counts = run(&config).unwrap().pop().unwrap().counts;
    let mean = (n_agents as u64 + steps) as f64 / n_agents as f64;

    let samples: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let rate = fit_exponential(&samples).unwrap();
    assert!((rate * mean - 1.0).abs() < 0.1, "rate {rate}");

    let mut sorted = samples;
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let ks = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - (-x / mean).exp();
            (cdf - i as f64 / n)
                .abs()
                .max((cdf - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    // 0.1% Kolmogorov critical value
    assert!(ks < 1.95 / n.sqrt(), "KS {ks}");
}

#[test]
fn strong_feedback_concentrates_on_one_agent() {
    let config = SimConfig::new(100, pl(2.0), vec![100_000], 5);
    let counts = run(&config).unwrap().pop().unwrap().counts;
    let total: u64 = counts.iter().sum();
    let top = *counts.iter().max().unwrap();
    assert!(top as f64 > 0.99 * total as f64, "{top} of {total}");
}
