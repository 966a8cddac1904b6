//! Ground-truth-controllable synthetic speaker data.
//!
//! Each speaker gets a Gaussian centroid; observations are noisy draws
//! around it, optionally drifting along a fixed per-speaker direction as the
//! segment index grows, which models the bias between database templates and
//! later test samples. Histogram-kind output pushes each draw through a
//! softmax and scales to 1000 pseudo-counts.
//!
//! Generation is a pure function of the config, seed included: speaker i
//! draws from stream i of a counter-based generator seeded by `seed`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::similarity::{
    distance, FeatureKind, FeatureObservation, ObservationSet, SimilarityMeasure,
};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_speakers: usize,
    pub obs_per_speaker: usize,
    pub dimension: usize,
    /// Scale of the isotropic Gaussian the speaker centroids are drawn from.
    pub inter_speaker_sigma: f64,
    /// Observation noise around the (possibly drifted) centroid.
    pub intra_speaker_sigma: f64,
    /// Centroid displacement per segment index along a fixed random unit
    /// direction; zero gives stationary speakers.
    pub drift_per_segment: f64,
    pub feature_kind: FeatureKind,
    pub seed: u64,
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if self.n_speakers < 2 {
            return Err(Error::InvalidParameter("need at least 2 speakers".into()));
        }
        if self.obs_per_speaker < 2 {
            return Err(Error::InvalidParameter(
                "need at least 2 observations per speaker".into(),
            ));
        }
        if self.dimension < 1 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        for (name, v) in [
            ("inter_speaker_sigma", self.inter_speaker_sigma),
            ("intra_speaker_sigma", self.intra_speaker_sigma),
            ("drift_per_segment", self.drift_per_segment),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }
}

const PSEUDO_COUNTS: f64 = 1000.0;

fn speaker_rng(seed: u64, speaker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(speaker as u64 + 1);
    rng
}

fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, dim: usize, sigma: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * sigma)
        .collect()
}

fn unit_vec<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(rng, dim, 1.0);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn to_feature(kind: FeatureKind, raw: Vec<f64>) -> Result<FeatureObservation> {
    match kind {
        FeatureKind::EmbeddingVector => FeatureObservation::embedding(raw),
        FeatureKind::CountHistogram => {
            let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = raw.iter().map(|&v| (v - max).exp()).collect();
            let total: f64 = weights.iter().sum();
            let counts: Vec<f64> = weights
                .iter()
                .map(|w| (w / total * PSEUDO_COUNTS).round())
                .collect();
            FeatureObservation::counts(counts)
        }
    }
}

/// Speaker centroid and drift direction, derived from the speaker's stream.
fn speaker_geometry(config: &SynthConfig, speaker: usize) -> (Vec<f64>, Vec<f64>, ChaCha8Rng) {
    let mut rng = speaker_rng(config.seed, speaker);
    let centroid = gaussian_vec(&mut rng, config.dimension, config.inter_speaker_sigma);
    let drift_dir = unit_vec(&mut rng, config.dimension);
    (centroid, drift_dir, rng)
}

/// Generate the full observation set described by the config.
pub fn generate(config: &SynthConfig) -> Result<ObservationSet> {
    config.validate()?;
    let mut speakers = Vec::with_capacity(config.n_speakers);
    let mut observations = Vec::with_capacity(config.n_speakers);
    for i in 0..config.n_speakers {
        let (centroid, drift_dir, mut rng) = speaker_geometry(config, i);
        let mut obs = Vec::with_capacity(config.obs_per_speaker);
        for t in 0..config.obs_per_speaker {
            let noise = gaussian_vec(&mut rng, config.dimension, config.intra_speaker_sigma);
            let shift = t as f64 * config.drift_per_segment;
            let raw: Vec<f64> = centroid
                .iter()
                .zip(&drift_dir)
                .zip(&noise)
                .map(|((c, u), e)| c + shift * u + e)
                .collect();
            obs.push(to_feature(config.feature_kind, raw)?);
        }
        speakers.push(format!("spk{i:04}"));
        observations.push(obs);
    }
    ObservationSet::new(speakers, observations)
}

/// Monte Carlo estimate of the per-template win probabilities of speaker 0:
/// for each other speaker k, the fraction of trials in which a fresh
/// observation of speaker 0 lies closer to speaker 0's template than to
/// speaker k's. Every trial redraws all templates and the test observation
/// around the fixed centroids (drift is not applied), using the default
/// measure for the configured feature kind.
///
/// Serves as an oracle independent of the rank pipeline's fold machinery.
pub fn theta_oracle(config: &SynthConfig, trials: usize, rng_seed: u64) -> Result<Vec<f64>> {
    config.validate()?;
    if trials < 1 {
        return Err(Error::InvalidParameter("need at least 1 trial".into()));
    }
    let centroids: Vec<Vec<f64>> = (0..config.n_speakers)
        .map(|i| speaker_geometry(config, i).0)
        .collect();
    let measure = SimilarityMeasure::default_for(config.feature_kind);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut wins = vec![0u64; config.n_speakers - 1];
    let observe = |rng: &mut ChaCha8Rng, centroid: &[f64]| -> Result<FeatureObservation> {
        let noise = gaussian_vec(rng, config.dimension, config.intra_speaker_sigma);
        let raw = centroid.iter().zip(&noise).map(|(c, e)| c + e).collect();
        to_feature(config.feature_kind, raw)
    };
    for _ in 0..trials {
        let templates: Vec<FeatureObservation> = centroids
            .iter()
            .map(|c| observe(&mut rng, c))
            .collect::<Result<_>>()?;
        let test = observe(&mut rng, &centroids[0])?;
        let own = distance(&templates[0], &test, measure)?;
        for (slot, template) in wins.iter_mut().zip(&templates[1..]) {
            if own < distance(template, &test, measure)? {
                *slot += 1;
            }
        }
    }
    Ok(wins.into_iter().map(|w| w as f64 / trials as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::cross_validate;
    use crate::metrics::disclosure_stats;
    use crate::rank::normalize;

    fn base_config() -> SynthConfig {
        SynthConfig {
            n_speakers: 4,
            obs_per_speaker: 6,
            dimension: 5,
            inter_speaker_sigma: 1.0,
            intra_speaker_sigma: 0.1,
            drift_per_segment: 0.0,
            feature_kind: FeatureKind::EmbeddingVector,
            seed: 99,
        }
    }

    #[test]
    fn deterministic_generation() {
        let config = base_config();
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a.speakers(), b.speakers());
        for i in 0..a.n_speakers() {
            assert_eq!(a.observations_of(i), b.observations_of(i));
        }
        let other = generate(&SynthConfig {
            seed: 100,
            ..config
        })
        .unwrap();
        assert_ne!(a.observations_of(0), other.observations_of(0));
    }

    #[test]
    fn noiseless_speakers_repeat_and_identify() {
        let config = SynthConfig {
            intra_speaker_sigma: 0.0,
            ..base_config()
        };
        let data = generate(&config).unwrap();
        for i in 0..data.n_speakers() {
            let obs = data.observations_of(i);
            assert!(obs.iter().all(|o| o == &obs[0]));
        }
        let hist = cross_validate(&data, SimilarityMeasure::CosineDistance, 1, 1).unwrap();
        let stats = disclosure_stats(normalize(&hist).unwrap().probs()).unwrap();
        assert_eq!(stats.identification_rate, 1.0);
    }

    #[test]
    fn histogram_kind_produces_valid_counts() {
        let config = SynthConfig {
            feature_kind: FeatureKind::CountHistogram,
            dimension: 16,
            ..base_config()
        };
        let data = generate(&config).unwrap();
        for i in 0..data.n_speakers() {
            for obs in data.observations_of(i) {
                let total: f64 = obs.values().iter().sum();
                assert!(obs.values().iter().all(|&v| v >= 0.0 && v.fract() == 0.0));
                assert!(
                    (total - PSEUDO_COUNTS).abs() <= config.dimension as f64 / 2.0,
                    "total {total}"
                );
            }
        }
    }

    #[test]
    fn drift_moves_observations() {
        let config = SynthConfig {
            intra_speaker_sigma: 0.0,
            drift_per_segment: 0.5,
            ..base_config()
        };
        let data = generate(&config).unwrap();
        let obs = data.observations_of(0);
        // displacement grows linearly along one direction
        let dist01: f64 = obs[0]
            .values()
            .iter()
            .zip(obs[1].values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let dist05: f64 = obs[0]
            .values()
            .iter()
            .zip(obs[5].values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!((dist01 - 0.5).abs() < 1e-9);
        assert!((dist05 - 2.5).abs() < 1e-9);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(generate(&SynthConfig {
            n_speakers: 1,
            ..base_config()
        })
        .is_err());
        assert!(generate(&SynthConfig {
            obs_per_speaker: 1,
            ..base_config()
        })
        .is_err());
        assert!(generate(&SynthConfig {
            dimension: 0,
            ..base_config()
        })
        .is_err());
        assert!(generate(&SynthConfig {
            intra_speaker_sigma: -1.0,
            ..base_config()
        })
        .is_err());
    }

    #[test]
    fn theta_oracle_noiseless_distinct_centroids() {
        let config = SynthConfig {
            intra_speaker_sigma: 0.0,
            ..base_config()
        };
        let thetas = theta_oracle(&config, 50, 7).unwrap();
        assert_eq!(thetas.len(), config.n_speakers - 1);
        assert!(thetas.iter().all(|&t| t == 1.0), "{thetas:?}");
    }

    #[test]
    fn theta_oracle_shared_centroid_is_chance() {
        let config = SynthConfig {
            inter_speaker_sigma: 0.0,
            intra_speaker_sigma: 1.0,
            n_speakers: 3,
            ..base_config()
        };
        let thetas = theta_oracle(&config, 20_000, 13).unwrap();
        for t in thetas {
            assert!((t - 0.5).abs() < 0.02, "theta {t}");
        }
    }
}
