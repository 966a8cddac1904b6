//! Disclosure statistics over a rank distribution, the equal-error-rate
//! baseline, and the flat-prefix anonymity diagnostic.
//!
//! Per-rank disclosure is ε_k = log2(N·p_k): the change in surprisal about
//! the identity relative to the uniform prior 1/N. Positive ε means the
//! identity became more probable than before the observation. Ranks with
//! p_k = 0 carry ε = −∞; they are excluded from the maximum and contribute
//! nothing to the probability-weighted mean and deviation.

use crate::betabinom::BetaBinomialModel;
use crate::error::{Error, Result};

/// Disclosure summary of one rank distribution, everything in bits except
/// the two fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct DisclosureReport {
    pub n_identities: usize,
    /// MeanD = Σ p_k ε_k, the expected disclosure per observation.
    pub mean_disclosure_bits: f64,
    /// IdR = p_1, the probability the true identity ranks first.
    pub identification_rate: f64,
    /// MaxD = max ε_k over ranks with positive probability.
    pub max_disclosure_bits: f64,
    /// StDD = sqrt(Σ p_k (ε_k − MeanD)²).
    pub stdd_bits: f64,
    /// Fraction of ranks with probability strictly above 1/N.
    pub spread: f64,
    /// ε_k per rank; −∞ where p_k = 0.
    pub per_rank_disclosure_bits: Vec<f64>,
}

impl DisclosureReport {
    /// Flat key-value rendering: bits to 4 decimals, fractions to 6.
    pub fn to_document_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("n_identities = {}\n", self.n_identities));
        out.push_str(&format!(
            "mean_disclosure_bits = {:.4}\n",
            self.mean_disclosure_bits
        ));
        out.push_str(&format!(
            "identification_rate = {:.6}\n",
            self.identification_rate
        ));
        out.push_str(&format!(
            "max_disclosure_bits = {:.4}\n",
            self.max_disclosure_bits
        ));
        out.push_str(&format!("stdd_bits = {:.4}\n", self.stdd_bits));
        out.push_str(&format!("spread = {:.6}\n", self.spread));
        let ranks: Vec<String> = self
            .per_rank_disclosure_bits
            .iter()
            .map(|e| format!("{e:.4}"))
            .collect();
        out.push_str(&format!("per_rank_disclosure_bits = {}\n", ranks.join(",")));
        out
    }
}

/// Similarity scores split into same-identity and different-identity trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    pub genuine: Vec<f64>,
    pub impostor: Vec<f64>,
    /// True when larger scores mean more similar; false for distances.
    pub higher_is_more_similar: bool,
}

/// Disclosure statistics of a normalized rank distribution.
pub fn disclosure_stats(dist: &[f64]) -> Result<DisclosureReport> {
    let n = dist.len();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least 2 ranks".into()));
    }
    if dist.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidParameter(
            "probabilities must be finite and >= 0".into(),
        ));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "distribution sums to {total}, expected 1"
        )));
    }
    let log2_n = (n as f64).log2();
    let eps: Vec<f64> = dist
        .iter()
        .map(|&p| {
            if p > 0.0 {
                log2_n + p.log2()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();

    let mean: f64 = dist
        .iter()
        .zip(&eps)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, e)| p * e)
        .sum();
    let variance: f64 = dist
        .iter()
        .zip(&eps)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, e)| p * (e - mean) * (e - mean))
        .sum();
    let max = dist
        .iter()
        .zip(&eps)
        .filter(|(p, _)| **p > 0.0)
        .map(|(_, e)| *e)
        .fold(f64::NEG_INFINITY, f64::max);
    // strictly above the uniform level, with relative slack so a computed
    // pmf that equals 1/N up to rounding counts as level
    let threshold = (1.0 / n as f64) * (1.0 + 1e-12);
    let above = dist.iter().filter(|&&p| p > threshold).count();

    Ok(DisclosureReport {
        n_identities: n,
        mean_disclosure_bits: mean,
        identification_rate: dist[0],
        max_disclosure_bits: max,
        stdd_bits: variance.max(0.0).sqrt(),
        spread: above as f64 / n as f64,
        per_rank_disclosure_bits: eps,
    })
}

/// Disclosure statistics of the model's pmf over ranks 1..=N.
pub fn model_disclosure_stats(model: &BetaBinomialModel) -> Result<DisclosureReport> {
    disclosure_stats(&model.pmf_all())
}

/// Equal error rate: the operating point where the false acceptance rate
/// over impostor scores equals the false rejection rate over genuine scores.
///
/// Thresholds sweep the merged score values; the crossing is located by
/// linear interpolation between the two adjacent thresholds where FAR − FRR
/// changes sign. Invariant under any strictly monotone transform applied to
/// all scores jointly. Sensible systems land in [0, 0.5]; a result above 0.5
/// means the scores separate in the direction opposite to
/// `higher_is_more_similar`.
pub fn equal_error_rate(scores: &ScoreSet) -> Result<f64> {
    if scores.genuine.is_empty() || scores.impostor.is_empty() {
        return Err(Error::EmptyInput("score set"));
    }
    if scores
        .genuine
        .iter()
        .chain(&scores.impostor)
        .any(|s| !s.is_finite())
    {
        return Err(Error::NonFinite("scores"));
    }
    let orient = |v: f64| if scores.higher_is_more_similar { v } else { -v };
    let mut genuine: Vec<f64> = scores.genuine.iter().map(|&v| orient(v)).collect();
    let mut impostor: Vec<f64> = scores.impostor.iter().map(|&v| orient(v)).collect();
    genuine.sort_by(f64::total_cmp);
    impostor.sort_by(f64::total_cmp);

    let mut thresholds: Vec<f64> = genuine.iter().chain(&impostor).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    // sentinel past the top so the sweep always ends at FAR = 0, FRR = 1
    let top = *thresholds.last().expect("non-empty");
    thresholds.push(if top == f64::MAX {
        top
    } else {
        top + 1.0 + top.abs()
    });

    // accept when score >= threshold
    let far = |t: f64| {
        let first = impostor.partition_point(|&s| s < t);
        (impostor.len() - first) as f64 / impostor.len() as f64
    };
    let frr = |t: f64| {
        let first = genuine.partition_point(|&s| s < t);
        first as f64 / genuine.len() as f64
    };

    let mut prev_far = far(thresholds[0]);
    let mut prev_diff = prev_far - frr(thresholds[0]);
    if prev_diff <= 0.0 {
        return Ok(prev_far);
    }
    for &t in &thresholds[1..] {
        let cur_far = far(t);
        let diff = cur_far - frr(t);
        if diff <= 0.0 {
            let lambda = prev_diff / (prev_diff - diff);
            return Ok(prev_far + lambda * (cur_far - prev_far));
        }
        prev_far = cur_far;
        prev_diff = diff;
    }
    unreachable!("sentinel threshold forces FAR - FRR <= 0");
}

/// Length of the flat high-probability prefix: the largest k such that ranks
/// 1..=k all exceed the uniform level 1/N and stay within `tolerance`
/// relative spread of each other. Returns 0 when p_1 <= 1/N.
pub fn k_anonymity_prefix(dist: &[f64], tolerance: f64) -> usize {
    let n = dist.len();
    if n == 0 {
        return 0;
    }
    // same uniform-level slack as the spread statistic
    let threshold = (1.0 / n as f64) * (1.0 + 1e-12);
    if dist[0].is_nan() || dist[0] <= threshold {
        return 0;
    }
    let mut lo = dist[0];
    let mut hi = dist[0];
    let mut k = 1;
    for &p in &dist[1..] {
        if p <= threshold {
            break;
        }
        let lo2 = lo.min(p);
        let hi2 = hi.max(p);
        if (hi2 - lo2) > tolerance * hi2 {
            break;
        }
        lo = lo2;
        hi = hi2;
        k += 1;
    }
    k
}
