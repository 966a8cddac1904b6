//! Feature observations and the distance measures used to compare a test
//! input against database templates.
//!
//! Two feature families are supported: dense embedding vectors compared with
//! cosine or Euclidean distance, and count histograms compared with Hellinger
//! distance or Jensen-Shannon divergence after normalization to empirical
//! probability distributions. Histogram measures use base-2 logarithms.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    EmbeddingVector,
    CountHistogram,
}

impl FeatureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureKind::EmbeddingVector => "embedding",
            FeatureKind::CountHistogram => "counts",
        }
    }
}

/// One observation: either an embedding vector or a histogram of counts.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureObservation {
    kind: FeatureKind,
    values: Vec<f64>,
}

impl FeatureObservation {
    pub fn embedding(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("embedding vector"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("embedding vector"));
        }
        Ok(Self {
            kind: FeatureKind::EmbeddingVector,
            values,
        })
    }

    /// Raw counts; must be non-negative and not all zero.
    pub fn counts(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("count histogram"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("count histogram"));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter(
                "negative count in histogram".into(),
            ));
        }
        if values.iter().sum::<f64>() <= 0.0 {
            return Err(Error::ZeroMassHistogram);
        }
        Ok(Self {
            kind: FeatureKind::CountHistogram,
            values,
        })
    }

    pub fn new(kind: FeatureKind, values: Vec<f64>) -> Result<Self> {
        match kind {
            FeatureKind::EmbeddingVector => Self::embedding(values),
            FeatureKind::CountHistogram => Self::counts(values),
        }
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }
}

/// Per-speaker observation sequences with a uniform kind, dimension, and
/// per-speaker count.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    speakers: Vec<String>,
    observations: Vec<Vec<FeatureObservation>>,
}

impl ObservationSet {
    pub fn new(speakers: Vec<String>, observations: Vec<Vec<FeatureObservation>>) -> Result<Self> {
        if speakers.len() != observations.len() {
            return Err(Error::InvalidParameter(
                "speaker list and observation table lengths differ".into(),
            ));
        }
        if speakers.len() < 2 {
            return Err(Error::InvalidParameter("need at least 2 speakers".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for id in &speakers {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate speaker id {id:?}"
                )));
            }
        }
        let k = observations[0].len();
        if k == 0 {
            return Err(Error::EmptyInput("observation sequence"));
        }
        let first = &observations[0][0];
        for (id, obs) in speakers.iter().zip(&observations) {
            if obs.len() != k {
                return Err(Error::InvalidParameter(format!(
                    "speaker {id:?} has {} observations, expected {k}",
                    obs.len()
                )));
            }
            for o in obs {
                if o.kind() != first.kind() {
                    return Err(Error::KindMismatch);
                }
                if o.dimension() != first.dimension() {
                    return Err(Error::DimensionMismatch {
                        left: o.dimension(),
                        right: first.dimension(),
                    });
                }
            }
        }
        Ok(Self {
            speakers,
            observations,
        })
    }

    pub fn speakers(&self) -> &[String] {
        &self.speakers
    }

    pub fn n_speakers(&self) -> usize {
        self.speakers.len()
    }

    /// K, the uniform number of observations per speaker.
    pub fn obs_per_speaker(&self) -> usize {
        self.observations[0].len()
    }

    pub fn kind(&self) -> FeatureKind {
        self.observations[0][0].kind()
    }

    pub fn dimension(&self) -> usize {
        self.observations[0][0].dimension()
    }

    pub fn observations_of(&self, speaker_index: usize) -> &[FeatureObservation] {
        &self.observations[speaker_index]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityMeasure {
    CosineDistance,
    EuclideanDistance,
    HellingerDistance,
    JensenShannonDivergence,
}

impl SimilarityMeasure {
    pub fn as_str(&self) -> &'static str {
        match self {
            SimilarityMeasure::CosineDistance => "cosine",
            SimilarityMeasure::EuclideanDistance => "euclidean",
            SimilarityMeasure::HellingerDistance => "hellinger",
            SimilarityMeasure::JensenShannonDivergence => "jensen-shannon",
        }
    }

    pub fn compatible_with(&self, kind: FeatureKind) -> bool {
        match self {
            SimilarityMeasure::CosineDistance | SimilarityMeasure::EuclideanDistance => {
                kind == FeatureKind::EmbeddingVector
            }
            SimilarityMeasure::HellingerDistance | SimilarityMeasure::JensenShannonDivergence => {
                kind == FeatureKind::CountHistogram
            }
        }
    }

    /// Cosine for embeddings, Hellinger for histograms.
    pub fn default_for(kind: FeatureKind) -> SimilarityMeasure {
        match kind {
            FeatureKind::EmbeddingVector => SimilarityMeasure::CosineDistance,
            FeatureKind::CountHistogram => SimilarityMeasure::HellingerDistance,
        }
    }
}

impl std::str::FromStr for SimilarityMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(SimilarityMeasure::CosineDistance),
            "euclidean" => Ok(SimilarityMeasure::EuclideanDistance),
            "hellinger" => Ok(SimilarityMeasure::HellingerDistance),
            "jensen-shannon" => Ok(SimilarityMeasure::JensenShannonDivergence),
            other => Err(Error::InvalidParameter(format!(
                "unknown measure {other:?}"
            ))),
        }
    }
}

/// Symmetric distance between two observations of the same kind and dimension.
///
/// Histogram inputs are normalized to probability distributions first, so
/// Hellinger and Jensen-Shannon are invariant to the raw count scale; cosine
/// is invariant to positive scaling of either argument.
pub fn distance(
    a: &FeatureObservation,
    b: &FeatureObservation,
    measure: SimilarityMeasure,
) -> Result<f64> {
    if a.kind() != b.kind() {
        return Err(Error::KindMismatch);
    }
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch {
            left: a.dimension(),
            right: b.dimension(),
        });
    }
    if !measure.compatible_with(a.kind()) {
        return Err(Error::IncompatibleMeasure {
            measure: measure.as_str(),
            kind: a.kind().as_str(),
        });
    }
    match measure {
        SimilarityMeasure::CosineDistance => cosine_distance(a.values(), b.values()),
        SimilarityMeasure::EuclideanDistance => Ok(euclidean_distance(a.values(), b.values())),
        SimilarityMeasure::HellingerDistance => hellinger_distance(a.values(), b.values()),
        SimilarityMeasure::JensenShannonDivergence => jensen_shannon(a.values(), b.values()),
    }
}

/// Combine observations of one segment: histograms add their counts,
/// embeddings take the element-wise mean.
pub fn aggregate(obs: &[FeatureObservation]) -> Result<FeatureObservation> {
    let first = obs.first().ok_or(Error::EmptyInput("aggregate"))?;
    let dim = first.dimension();
    let kind = first.kind();
    for o in obs {
        if o.kind() != kind {
            return Err(Error::KindMismatch);
        }
        if o.dimension() != dim {
            return Err(Error::DimensionMismatch {
                left: o.dimension(),
                right: dim,
            });
        }
    }
    let mut acc = vec![0.0f64; dim];
    for o in obs {
        for (slot, v) in acc.iter_mut().zip(o.values()) {
            *slot += v;
        }
    }
    if kind == FeatureKind::EmbeddingVector {
        let inv = 1.0 / obs.len() as f64;
        for slot in &mut acc {
            *slot *= inv;
        }
    }
    Ok(FeatureObservation { kind, values: acc })
}

fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNormVector);
    }
    Ok((1.0 - dot / (na.sqrt() * nb.sqrt())).max(0.0))
}

fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn normalized(h: &[f64]) -> Result<Vec<f64>> {
    let mass: f64 = h.iter().sum();
    if mass <= 0.0 {
        return Err(Error::ZeroMassHistogram);
    }
    Ok(h.iter().map(|&v| v / mass).collect())
}

fn hellinger_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    let p = normalized(a)?;
    let q = normalized(b)?;
    let bc: f64 = p.iter().zip(&q).map(|(&x, &y)| (x * y).sqrt()).sum();
    Ok((1.0 - bc).max(0.0).sqrt())
}

/// Base-2 Jensen-Shannon divergence of the normalized histograms, in [0, 1].
fn jensen_shannon(a: &[f64], b: &[f64]) -> Result<f64> {
    let p = normalized(a)?;
    let q = normalized(b)?;
    let mut acc = 0.0;
    for (&x, &y) in p.iter().zip(&q) {
        let m = 0.5 * (x + y);
        if x > 0.0 {
            acc += 0.5 * x * (x / m).log2();
        }
        if y > 0.0 {
            acc += 0.5 * y * (y / m).log2();
        }
    }
    Ok(acc.max(0.0))
}
