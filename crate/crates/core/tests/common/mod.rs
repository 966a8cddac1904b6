//! Shared helpers for the integration suites: chi-square uniformity tests,
//! sampling into empirical distributions, and an independent brute-force
//! disclosure oracle the library results are checked against.
// each test target uses a different subset of these helpers
#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankdisc::special::gamma_q;
use rankdisc::{BetaBinomialModel, EmpiricalDistribution};

/// Upper-tail p-value of the chi-square goodness-of-fit statistic of the
/// observed counts against the expected probabilities.
pub fn chi_square_pvalue(counts: &[u64], expected_probs: &[f64]) -> f64 {
    assert_eq!(counts.len(), expected_probs.len());
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    for (&c, &p) in counts.iter().zip(expected_probs) {
        let expected = total as f64 * p;
        assert!(expected > 0.0, "chi-square needs positive expected counts");
        let d = c as f64 - expected;
        stat += d * d / expected;
    }
    let df = (counts.len() - 1) as f64;
    gamma_q(df / 2.0, stat / 2.0)
}

pub fn chi_square_uniform_pvalue(counts: &[u64]) -> f64 {
    let p = vec![1.0 / counts.len() as f64; counts.len()];
    chi_square_pvalue(counts, &p)
}

/// Draw `draws` ranks from the model and return the sampled counts.
pub fn sample_counts(model: &BetaBinomialModel, draws: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; model.n_identities()];
    for _ in 0..draws {
        counts[model.sample_rank(&mut rng) - 1] += 1;
    }
    counts
}

pub fn sample_distribution(
    model: &BetaBinomialModel,
    draws: u64,
    seed: u64,
) -> EmpiricalDistribution {
    let counts = sample_counts(model, draws, seed);
    EmpiricalDistribution::new(counts.iter().map(|&c| c as f64 / draws as f64).collect()).unwrap()
}

/// Brute-force disclosure statistics, written independently of the library:
/// per-rank disclosure log2(N·p), probability-weighted mean and deviation,
/// max over supported ranks, rank-1 rate, and the strict spread count.
pub struct OracleStats {
    pub mean: f64,
    pub idr: f64,
    pub max: f64,
    pub stdd: f64,
    pub spread: f64,
}

pub fn disclosure_oracle(dist: &[f64]) -> OracleStats {
    let n = dist.len() as f64;
    let mut mean = 0.0;
    let mut max = f64::NEG_INFINITY;
    for &p in dist {
        if p > 0.0 {
            let eps = (n * p).log2();
            mean += p * eps;
            if eps > max {
                max = eps;
            }
        }
    }
    let mut var = 0.0;
    for &p in dist {
        if p > 0.0 {
            let eps = (n * p).log2();
            var += p * (eps - mean) * (eps - mean);
        }
    }
    let spread = dist.iter().filter(|&&p| p > 1.0 / n).count() as f64 / n;
    OracleStats {
        mean,
        idr: dist[0],
        max,
        stdd: var.sqrt(),
        spread,
    }
}
