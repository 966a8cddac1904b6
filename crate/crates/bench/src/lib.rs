//! Deterministic fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankdisc::synth::{generate, SynthConfig};
use rankdisc::{BetaBinomialModel, EmpiricalDistribution, FeatureKind, ObservationSet};

/// Moderately noisy embedding set: 16 speakers, 20 observations, dim 8.
pub fn embedding_set() -> ObservationSet {
    generate(&SynthConfig {
        n_speakers: 16,
        obs_per_speaker: 20,
        dimension: 8,
        inter_speaker_sigma: 1.0,
        intra_speaker_sigma: 0.3,
        drift_per_segment: 0.0,
        feature_kind: FeatureKind::EmbeddingVector,
        seed: 17,
    })
    .expect("valid config")
}

/// Empirical distribution of `draws` ranks sampled from the model.
pub fn sampled_distribution(
    model: &BetaBinomialModel,
    draws: u64,
    seed: u64,
) -> EmpiricalDistribution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; model.n_identities()];
    for _ in 0..draws {
        counts[model.sample_rank(&mut rng) - 1] += 1;
    }
    EmpiricalDistribution::new(counts.iter().map(|&c| c as f64 / draws as f64).collect())
        .expect("normalized")
}

/// Two well-separated Gaussian score clouds of `n` samples each.
pub fn gaussian_scores(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    use rand_distr::{Distribution, Normal};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let genuine = Normal::new(1.0, 1.0).unwrap();
    let impostor = Normal::new(-1.0, 1.0).unwrap();
    (
        (0..n).map(|_| genuine.sample(&mut rng)).collect(),
        (0..n).map(|_| impostor.sample(&mut rng)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        let a = embedding_set();
        let b = embedding_set();
        assert_eq!(a.speakers(), b.speakers());
        let model = BetaBinomialModel::new(2.0, 8.0, 100).unwrap();
        assert_eq!(
            sampled_distribution(&model, 1000, 5).probs(),
            sampled_distribution(&model, 1000, 5).probs()
        );
    }
}
