//! Similarity-rank accumulation: score a test input against every template,
//! rank-order the distances, and tally the true identity's rank.
//!
//! Rank 1 is the most similar (smallest distance). Ties are resolved
//! pessimistically against the true speaker, so reported disclosure is a
//! lower bound on degenerate or quantized features.

use crate::error::{Error, Result};
use crate::experiments::ExperimentPlan;
use crate::similarity::{aggregate, distance, ObservationSet, SimilarityMeasure};

/// Counts of the true identity's similarity rank; index 0 holds rank 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankHistogram {
    counts: Vec<u64>,
}

impl RankHistogram {
    /// Empty histogram over ranks 1..=n_identities.
    pub fn new(n_identities: usize) -> Result<Self> {
        if n_identities < 2 {
            return Err(Error::InvalidParameter("need at least 2 identities".into()));
        }
        Ok(Self {
            counts: vec![0; n_identities],
        })
    }

    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::InvalidParameter("need at least 2 identities".into()));
        }
        Ok(Self { counts })
    }

    pub fn n_identities(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_trials(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Tally one observed rank (1-based).
    pub fn record(&mut self, rank: usize) {
        assert!(
            rank >= 1 && rank <= self.counts.len(),
            "rank {rank} out of range"
        );
        self.counts[rank - 1] += 1;
    }

    /// Two-column CSV with a header line and exactly one row per rank.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("rank,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, c));
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == "rank,count" => {}
            Some((_, header)) => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header \"rank,count\", found {header:?}"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "empty file".into(),
                })
            }
        }
        let mut counts = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (rank_str, count_str) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected rank,count".into(),
            })?;
            let rank: usize = rank_str.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad rank {rank_str:?}"),
            })?;
            if rank != counts.len() + 1 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected rank {}, found {rank}", counts.len() + 1),
                });
            }
            let count: u64 = count_str.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad count {count_str:?}"),
            })?;
            counts.push(count);
        }
        Self::from_counts(counts)
    }
}

/// Normalized rank probabilities, summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    probs: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidParameter("need at least 2 ranks".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidParameter(
                "probabilities must be finite and >= 0".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_identities(&self) -> usize {
        self.probs.len()
    }
}

/// Rank of the true identity among the distances, 1-based, with ties counted
/// against the true identity (tied templates are placed ahead of it).
pub fn rank_of_true(distances: &[f64], true_index: usize) -> Result<usize> {
    if distances.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 distances".into()));
    }
    if true_index >= distances.len() {
        return Err(Error::IndexOutOfRange {
            index: true_index,
            len: distances.len(),
        });
    }
    if distances.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFinite("distances"));
    }
    let own = distances[true_index];
    let mut rank = 1;
    for (i, &d) in distances.iter().enumerate() {
        if i != true_index && d <= own {
            rank += 1;
        }
    }
    Ok(rank)
}

/// One (speaker, rank) pair per (fold, test speaker) cell, in fold-major
/// order. Shared by the pooled and per-speaker accumulators.
pub(crate) fn collect_ranks(
    data: &ObservationSet,
    measure: SimilarityMeasure,
    plan: &ExperimentPlan,
) -> Result<Vec<(usize, usize)>> {
    if plan.obs_per_speaker() != data.obs_per_speaker() {
        return Err(Error::InvalidPlan(format!(
            "plan expects K = {}, data has K = {}",
            plan.obs_per_speaker(),
            data.obs_per_speaker()
        )));
    }
    let n = data.n_speakers();
    let mut out = Vec::with_capacity(plan.folds().len() * n);
    for &start in plan.folds() {
        let (input_idx, template_idx) = plan.indices_at(start);
        let mut tests = Vec::with_capacity(n);
        let mut templates = Vec::with_capacity(n);
        for speaker in 0..n {
            let obs = data.observations_of(speaker);
            let test_obs: Vec<_> = input_idx.iter().map(|&i| obs[i].clone()).collect();
            let template_obs: Vec<_> = template_idx.iter().map(|&i| obs[i].clone()).collect();
            tests.push(aggregate(&test_obs)?);
            templates.push(aggregate(&template_obs)?);
        }
        let mut distances = vec![0.0f64; n];
        for (speaker, test) in tests.iter().enumerate() {
            for (slot, template) in distances.iter_mut().zip(&templates) {
                *slot = distance(template, test, measure)?;
            }
            let rank = rank_of_true(&distances, speaker)?;
            out.push((speaker, rank));
        }
    }
    Ok(out)
}

/// Pooled rank histogram over every (test speaker, fold) pair of the plan.
pub fn accumulate_ranks(
    data: &ObservationSet,
    measure: SimilarityMeasure,
    plan: &ExperimentPlan,
) -> Result<RankHistogram> {
    let mut hist = RankHistogram::new(data.n_speakers())?;
    for (_, rank) in collect_ranks(data, measure, plan)? {
        hist.record(rank);
    }
    Ok(hist)
}

/// Empirical probability distribution of the histogram.
pub fn normalize(hist: &RankHistogram) -> Result<EmpiricalDistribution> {
    let total = hist.total_trials();
    if total == 0 {
        return Err(Error::EmptyInput("rank histogram has no trials"));
    }
    let inv = 1.0 / total as f64;
    EmpiricalDistribution::new(hist.counts().iter().map(|&c| c as f64 * inv).collect())
}
