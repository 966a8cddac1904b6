//! Experiment machinery: segment indexing with maximum separation between
//! test and template segments, fold iteration, per-speaker histograms, and
//! length-scaling scans with composition-bound reference curves.
//!
//! With K observations per speaker, a fold starting at S takes test indices
//! (S + [0, T)) mod K and template indices (S + T + Δ + [0, D)) mod K where
//! Δ = floor((K − S − T)/2), placing the template block halfway around the
//! remaining gap. Folds whose template block would wrap onto the test block
//! are rejected at construction.

use crate::error::{Error, Result};
use crate::metrics::disclosure_stats;
use crate::rank::{accumulate_ranks, collect_ranks, normalize, RankHistogram};
use crate::similarity::{ObservationSet, SimilarityMeasure};

/// Segment-indexing parameters: K observations per speaker, T test
/// observations, D template observations, and the fold starts to iterate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentPlan {
    obs_per_speaker: usize,
    test_len: usize,
    template_len: usize,
    start: usize,
    folds: Vec<usize>,
}

impl ExperimentPlan {
    /// Plan for a single fold starting at `start`.
    pub fn single(
        obs_per_speaker: usize,
        test_len: usize,
        template_len: usize,
        start: usize,
    ) -> Result<Self> {
        validate_fold(obs_per_speaker, start, test_len, template_len)?;
        Ok(Self {
            obs_per_speaker,
            test_len,
            template_len,
            start,
            folds: vec![start],
        })
    }

    /// Cross-validation plan iterating every valid start in [0, K).
    pub fn sweep(obs_per_speaker: usize, test_len: usize, template_len: usize) -> Result<Self> {
        check_lengths(obs_per_speaker, test_len, template_len)?;
        let folds: Vec<usize> = (0..obs_per_speaker)
            .filter(|&s| validate_fold(obs_per_speaker, s, test_len, template_len).is_ok())
            .collect();
        let &start = folds.first().ok_or_else(|| {
            Error::InvalidPlan(format!(
                "no valid fold for K={obs_per_speaker}, T={test_len}, D={template_len}"
            ))
        })?;
        Ok(Self {
            obs_per_speaker,
            test_len,
            template_len,
            start,
            folds,
        })
    }

    pub fn obs_per_speaker(&self) -> usize {
        self.obs_per_speaker
    }

    pub fn test_len(&self) -> usize {
        self.test_len
    }

    pub fn template_len(&self) -> usize {
        self.template_len
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Fold starts actually iterated.
    pub fn folds(&self) -> &[usize] {
        &self.folds
    }

    /// Index sets for an already-validated fold start.
    pub(crate) fn indices_at(&self, start: usize) -> (Vec<usize>, Vec<usize>) {
        let k = self.obs_per_speaker;
        let delta = (k - start - self.test_len) / 2;
        let inputs = (0..self.test_len).map(|i| (start + i) % k).collect();
        let templates = (0..self.template_len)
            .map(|i| (start + self.test_len + delta + i) % k)
            .collect();
        (inputs, templates)
    }
}

fn check_lengths(k: usize, t: usize, d: usize) -> Result<()> {
    if t < 1 || d < 1 {
        return Err(Error::InvalidPlan(
            "test and template lengths must be >= 1".into(),
        ));
    }
    if t + d > k {
        return Err(Error::InvalidPlan(format!(
            "test length {t} + template length {d} exceeds K = {k}"
        )));
    }
    Ok(())
}

/// A fold is valid when the test block fits before the end of the cycle and
/// the template block, after the Δ separation gap, does not wrap onto it.
fn validate_fold(k: usize, s: usize, t: usize, d: usize) -> Result<()> {
    check_lengths(k, t, d)?;
    if s >= k {
        return Err(Error::InvalidPlan(format!(
            "start {s} out of range for K = {k}"
        )));
    }
    if s + t > k {
        return Err(Error::InvalidPlan(format!(
            "start {s}: test segment runs past K = {k}"
        )));
    }
    let delta = (k - s - t) / 2;
    if t + delta + d > k {
        return Err(Error::InvalidPlan(format!(
            "start {s}: template segment wraps onto the test segment"
        )));
    }
    Ok(())
}

/// Test and template index sets for the plan's own start.
pub fn segment_indices(plan: &ExperimentPlan) -> (Vec<usize>, Vec<usize>) {
    plan.indices_at(plan.start)
}

/// Pooled rank histogram over all speakers and every valid fold start.
pub fn cross_validate(
    data: &ObservationSet,
    measure: SimilarityMeasure,
    test_len: usize,
    template_len: usize,
) -> Result<RankHistogram> {
    let plan = ExperimentPlan::sweep(data.obs_per_speaker(), test_len, template_len)?;
    accumulate_ranks(data, measure, &plan)
}

/// One rank histogram per speaker, in the data's speaker order; each
/// histogram totals the number of folds.
pub fn per_speaker_histograms(
    data: &ObservationSet,
    measure: SimilarityMeasure,
    test_len: usize,
    template_len: usize,
) -> Result<Vec<(String, RankHistogram)>> {
    let plan = ExperimentPlan::sweep(data.obs_per_speaker(), test_len, template_len)?;
    let n = data.n_speakers();
    let mut hists: Vec<RankHistogram> = (0..n)
        .map(|_| RankHistogram::new(n))
        .collect::<Result<_>>()?;
    for (speaker, rank) in collect_ranks(data, measure, &plan)? {
        hists[speaker].record(rank);
    }
    Ok(data.speakers().iter().cloned().zip(hists).collect())
}

/// One grid cell of a length scan.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthScanCell {
    pub test_len: usize,
    pub template_len: usize,
    pub mean_disclosure_bits: f64,
    pub bound_linear_bits: f64,
    pub bound_sqrt_bits: f64,
}

/// Mean disclosure per (T, D) cell plus composition-bound reference curves
/// anchored at the smallest T of each D row.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthScanResult {
    cells: Vec<LengthScanCell>,
}

impl LengthScanResult {
    pub fn cells(&self) -> &[LengthScanCell] {
        &self.cells
    }

    /// Cells of one D row, in increasing T.
    pub fn row(&self, template_len: usize) -> Vec<&LengthScanCell> {
        self.cells
            .iter()
            .filter(|c| c.template_len == template_len)
            .collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("T,D,mean_disclosure_bits,bound_linear_bits,bound_sqrt_bits\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.test_len,
                c.template_len,
                c.mean_disclosure_bits,
                c.bound_linear_bits,
                c.bound_sqrt_bits
            ));
        }
        out
    }
}

/// Sweep mean disclosure over a (T, D) grid. The linear and square-root
/// reference curves pass through the measured value at the smallest T of
/// each D row and scale as T/T0 and sqrt(T/T0) from there.
pub fn length_scan(
    data: &ObservationSet,
    measure: SimilarityMeasure,
    test_grid: &[usize],
    template_grid: &[usize],
) -> Result<LengthScanResult> {
    if test_grid.is_empty() || template_grid.is_empty() {
        return Err(Error::EmptyInput("length-scan grid"));
    }
    let mut t_grid = test_grid.to_vec();
    t_grid.sort_unstable();
    t_grid.dedup();
    let mut d_grid = template_grid.to_vec();
    d_grid.sort_unstable();
    d_grid.dedup();

    let mut cells = Vec::with_capacity(t_grid.len() * d_grid.len());
    for &d in &d_grid {
        let mut anchor: Option<(usize, f64)> = None;
        for &t in &t_grid {
            let hist = cross_validate(data, measure, t, d)?;
            let emp = normalize(&hist)?;
            let mean = disclosure_stats(emp.probs())?.mean_disclosure_bits;
            let (t0, m0) = *anchor.get_or_insert((t, mean));
            let ratio = t as f64 / t0 as f64;
            cells.push(LengthScanCell {
                test_len: t,
                template_len: d,
                mean_disclosure_bits: mean,
                bound_linear_bits: m0 * ratio,
                bound_sqrt_bits: m0 * ratio.sqrt(),
            });
        }
    }
    Ok(LengthScanResult { cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::FeatureObservation;

    #[test]
    fn indexing_examples() {
        // K=20, S=0, T=1, D=1: delta = 9, template at index 10
        let plan = ExperimentPlan::single(20, 1, 1, 0).unwrap();
        assert_eq!(segment_indices(&plan), (vec![0], vec![10]));

        // K=4, S=0, T=2, D=2: template block would wrap onto the test block
        assert!(ExperimentPlan::single(4, 2, 2, 0).is_err());

        // K=20, S=19, T=1, D=1: delta = 0, template wraps to index 0
        let plan = ExperimentPlan::single(20, 1, 1, 19).unwrap();
        assert_eq!(segment_indices(&plan), (vec![19], vec![0]));
    }

    #[test]
    fn sweep_skips_invalid_starts() {
        // K=4, T=2, D=2: only S=1 and S=2 give disjoint blocks
        let plan = ExperimentPlan::sweep(4, 2, 2).unwrap();
        assert_eq!(plan.folds(), &[1, 2]);
        assert_eq!(plan.indices_at(1), (vec![1, 2], vec![3, 0]));
        assert_eq!(plan.indices_at(2), (vec![2, 3], vec![0, 1]));

        // T=1, D=1 keeps every start
        let plan = ExperimentPlan::sweep(6, 1, 1).unwrap();
        assert_eq!(plan.folds().len(), 6);
    }

    #[test]
    fn oversized_lengths_rejected() {
        assert!(ExperimentPlan::sweep(4, 3, 2).is_err());
        assert!(ExperimentPlan::single(4, 0, 1, 0).is_err());
        assert!(ExperimentPlan::single(4, 1, 1, 7).is_err());
    }

    #[test]
    fn exhaustive_disjointness_small_k() {
        for k in 2..=12usize {
            for t in 1..=k {
                for d in 1..=k {
                    for s in 0..k {
                        let Ok(plan) = ExperimentPlan::single(k, t, d, s) else {
                            continue;
                        };
                        let (inputs, templates) = segment_indices(&plan);
                        assert_eq!(inputs.len(), t);
                        assert_eq!(templates.len(), d);
                        // formula check
                        let delta = (k - s - t) / 2;
                        for (i, &v) in inputs.iter().enumerate() {
                            assert_eq!(v, (s + i) % k);
                        }
                        for (i, &v) in templates.iter().enumerate() {
                            assert_eq!(v, (s + t + delta + i) % k);
                        }
                        // disjointness
                        for v in &templates {
                            assert!(!inputs.contains(v), "K={k} S={s} T={t} D={d}");
                        }
                    }
                }
            }
        }
    }

    fn two_speaker_set() -> ObservationSet {
        let a = FeatureObservation::embedding(vec![1.0, 0.0]).unwrap();
        let b = FeatureObservation::embedding(vec![0.0, 1.0]).unwrap();
        ObservationSet::new(
            vec!["alice".into(), "bob".into()],
            vec![vec![a.clone(), a], vec![b.clone(), b]],
        )
        .unwrap()
    }

    #[test]
    fn noiseless_two_speakers_all_rank_one() {
        let data = two_speaker_set();
        let hist = cross_validate(&data, SimilarityMeasure::CosineDistance, 1, 1).unwrap();
        // 2 folds x 2 speakers
        assert_eq!(hist.counts(), &[4, 0]);
    }

    #[test]
    fn label_permutation_invariance() {
        let data = two_speaker_set();
        let a = FeatureObservation::embedding(vec![0.0, 1.0]).unwrap();
        let b = FeatureObservation::embedding(vec![1.0, 0.0]).unwrap();
        let swapped = ObservationSet::new(
            vec!["bob".into(), "alice".into()],
            vec![vec![a.clone(), a], vec![b.clone(), b]],
        )
        .unwrap();
        let h1 = cross_validate(&data, SimilarityMeasure::CosineDistance, 1, 1).unwrap();
        let h2 = cross_validate(&swapped, SimilarityMeasure::CosineDistance, 1, 1).unwrap();
        assert_eq!(h1, h2);
    }

    #[test]
    fn per_speaker_pooling_identity() {
        let data = two_speaker_set();
        let pooled = cross_validate(&data, SimilarityMeasure::CosineDistance, 1, 1).unwrap();
        let per = per_speaker_histograms(&data, SimilarityMeasure::CosineDistance, 1, 1).unwrap();
        assert_eq!(per.len(), 2);
        assert_eq!(per[0].0, "alice");
        let mut sum = vec![0u64; pooled.n_identities()];
        for (_, h) in &per {
            assert_eq!(h.total_trials(), 2); // one per fold
            for (slot, c) in sum.iter_mut().zip(h.counts()) {
                *slot += c;
            }
        }
        assert_eq!(sum, pooled.counts());
    }
}
