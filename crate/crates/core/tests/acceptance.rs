//! Acceptance suite: one test per release criterion, each printing a
//! [PASS] line with its elapsed time (visible with `--nocapture`).
//!
//! Run with: cargo test -p rankdisc --test acceptance -- --nocapture

// frozen oracle constants keep their full digits
#![allow(clippy::excessive_precision)]

mod common;

use std::time::Instant;

use common::{chi_square_uniform_pvalue, disclosure_oracle, sample_distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rankdisc::experiments::{cross_validate, length_scan, ExperimentPlan};
use rankdisc::fit::{fit, goodness_of_fit, loss, FitOptions, LossKind, LossSpec};
use rankdisc::metrics::{disclosure_stats, equal_error_rate, ScoreSet};
use rankdisc::rank::normalize;
use rankdisc::synth::{generate, SynthConfig};
use rankdisc::{BetaBinomialModel, FeatureKind, SimilarityMeasure};

fn budget(name: &str, started: Instant, limit_secs: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < limit_secs,
        "{name} took {elapsed:.2}s, budget {limit_secs}s"
    );
    println!("[PASS] {name} ({elapsed:.2}s)");
}

#[test]
fn c1_beta_binomial_correctness() {
    let started = Instant::now();
    let params = [1e-3, 1.0, 10.0, 1e4];
    for n in [2usize, 10, 100, 11696] {
        for &alpha in &params {
            for &beta in &params {
                let model = BetaBinomialModel::new(alpha, beta, n).unwrap();
                let pmf = model.pmf_all();
                let total: f64 = pmf.iter().sum();
                assert!(
                    (total - 1.0).abs() < 1e-9,
                    "pmf sum {total} for N={n}, α={alpha}, β={beta}"
                );
                let mean = pmf
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i + 1) as f64 * p)
                    .sum::<f64>()
                    / total;
                let analytic = 1.0 + (n - 1) as f64 * alpha / (alpha + beta);
                assert!(
                    (mean - analytic).abs() < 1e-9,
                    "mean {mean} vs {analytic} for N={n}, α={alpha}, β={beta}"
                );
            }
        }
        let uniform = BetaBinomialModel::new(1.0, 1.0, n).unwrap();
        for p in uniform.pmf_all() {
            assert!((p - 1.0 / n as f64).abs() < 1e-12);
        }
    }
    budget("C1 beta-binomial correctness", started, 1.0);
}

#[test]
fn c2_fit_recovery() {
    let started = Instant::now();
    let cases = [(2.0, 8.0, 101u64), (0.5, 0.5, 102), (5.0, 1.0, 103)];
    for (alpha, beta, seed) in cases {
        let truth = BetaBinomialModel::new(alpha, beta, 100).unwrap();
        let emp = sample_distribution(&truth, 100_000, seed);
        let spec = LossSpec::new(LossKind::Ll);
        let result = fit(&emp, &spec, &FitOptions::default()).unwrap();
        let rel_alpha = (result.model.alpha() - alpha).abs() / alpha;
        let rel_beta = (result.model.beta() - beta).abs() / beta;
        assert!(
            rel_alpha < 0.10 && rel_beta < 0.10,
            "recovered ({}, {}) from truth ({alpha}, {beta})",
            result.model.alpha(),
            result.model.beta()
        );
        let loss_at_truth = loss(&emp, &truth, &spec).unwrap();
        assert!(
            result.loss_value <= loss_at_truth + 1e-6,
            "fit loss {} above truth loss {loss_at_truth}",
            result.loss_value
        );
    }
    budget("C2 fit recovery", started, 30.0);
}

#[test]
fn c3_disclosure_statistics_oracle() {
    let started = Instant::now();

    // worked example over four ranks
    let dist = [0.5, 0.25, 0.125, 0.125];
    let report = disclosure_stats(&dist).unwrap();
    let oracle = disclosure_oracle(&dist);
    assert!((report.mean_disclosure_bits - oracle.mean).abs() < 1e-9);
    assert!((report.identification_rate - oracle.idr).abs() < 1e-9);
    assert!((report.max_disclosure_bits - oracle.max).abs() < 1e-9);
    assert!((report.stdd_bits - oracle.stdd).abs() < 1e-9);
    assert!((report.spread - oracle.spread).abs() < 1e-9);
    // frozen expected values
    assert!((report.mean_disclosure_bits - 0.25).abs() < 1e-12);
    assert!((report.max_disclosure_bits - 1.0).abs() < 1e-12);
    assert!((report.identification_rate - 0.5).abs() < 1e-12);
    assert!((report.stdd_bits - 0.829156197588849962).abs() < 1e-12);
    assert!((report.spread - 0.25).abs() < 1e-12);

    // uniform: everything zero except IdR = 1/N
    let n = 64;
    let uniform = vec![1.0 / n as f64; n];
    let report = disclosure_stats(&uniform).unwrap();
    assert!(report.mean_disclosure_bits.abs() < 1e-12);
    assert!(report.max_disclosure_bits.abs() < 1e-12);
    assert!(report.stdd_bits.abs() < 1e-12);
    assert_eq!(report.spread, 0.0);

    // degenerate: all mass at rank 1
    let mut point = vec![0.0; 1024];
    point[0] = 1.0;
    let report = disclosure_stats(&point).unwrap();
    assert_eq!(report.mean_disclosure_bits, 10.0);
    assert_eq!(report.max_disclosure_bits, 10.0);
    assert_eq!(report.stdd_bits, 0.0);
    assert_eq!(report.identification_rate, 1.0);

    budget("C3 disclosure-statistics oracle", started, 5.0);
}

#[test]
fn c4_table_sign_reconciliation() {
    let started = Instant::now();

    // rank-1 probability 0.38% in a database of 11696 identities
    let n = 11696;
    let p1 = 0.0038;
    let mut dist = vec![(1.0 - p1) / (n - 1) as f64; n];
    dist[0] = p1;
    let report = disclosure_stats(&dist).unwrap();
    let maxd = report.max_disclosure_bits;
    assert!((5.46..=5.49).contains(&maxd), "F0 row MaxD {maxd}");
    assert!((maxd - 5.473942729846573).abs() < 1e-9);

    // rank-1 probability 96.74% in a database of 1251 identities
    let n = 1251;
    let p1 = 0.9674;
    let mut dist = vec![(1.0 - p1) / (n - 1) as f64; n];
    dist[0] = p1;
    let report = disclosure_stats(&dist).unwrap();
    let maxd = report.max_disclosure_bits;
    assert!((10.22..=10.26).contains(&maxd), "identity row MaxD {maxd}");
    assert!((maxd - 10.241050517062233).abs() < 1e-9);

    budget("C4 table-level sign reconciliation", started, 5.0);
}

#[test]
fn c5_equal_error_rate() {
    let started = Instant::now();

    let perfect = ScoreSet {
        genuine: vec![10.0, 11.0, 12.0, 13.0],
        impostor: vec![1.0, 2.0, 3.0],
        higher_is_more_similar: true,
    };
    assert_eq!(equal_error_rate(&perfect).unwrap(), 0.0);

    let same = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let chance = ScoreSet {
        genuine: same.clone(),
        impostor: same,
        higher_is_more_similar: true,
    };
    assert_eq!(equal_error_rate(&chance).unwrap(), 0.5);

    // genuine ~ N(+1, 1), impostor ~ N(−1, 1): analytic EER = Φ(−1) = 0.15866
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let genuine_dist = Normal::new(1.0, 1.0).unwrap();
    let impostor_dist = Normal::new(-1.0, 1.0).unwrap();
    let n = 100_000;
    let gaussians = ScoreSet {
        genuine: (0..n).map(|_| genuine_dist.sample(&mut rng)).collect(),
        impostor: (0..n).map(|_| impostor_dist.sample(&mut rng)).collect(),
        higher_is_more_similar: true,
    };
    let eer = equal_error_rate(&gaussians).unwrap();
    assert!((eer - 0.1587).abs() < 0.005, "two-Gaussian EER {eer}");

    budget("C5 equal error rate", started, 5.0);
}

#[test]
fn c6_end_to_end_pipeline() {
    let started = Instant::now();

    // noiseless, well-separated speakers: perfect identification
    let config = SynthConfig {
        n_speakers: 16,
        obs_per_speaker: 20,
        dimension: 8,
        inter_speaker_sigma: 1.0,
        intra_speaker_sigma: 0.0,
        drift_per_segment: 0.0,
        feature_kind: FeatureKind::EmbeddingVector,
        seed: 6001,
    };
    let data = generate(&config).unwrap();
    let hist = cross_validate(&data, SimilarityMeasure::CosineDistance, 1, 1).unwrap();
    assert_eq!(hist.total_trials(), 16 * 20);
    let report = disclosure_stats(normalize(&hist).unwrap().probs()).unwrap();
    assert_eq!(report.identification_rate, 1.0);
    assert_eq!(report.mean_disclosure_bits, 4.0);

    // shared centroid, unit noise: ranks indistinguishable from uniform
    let config = SynthConfig {
        n_speakers: 16,
        obs_per_speaker: 625,
        dimension: 8,
        inter_speaker_sigma: 0.0,
        intra_speaker_sigma: 1.0,
        drift_per_segment: 0.0,
        feature_kind: FeatureKind::EmbeddingVector,
        seed: 7,
    };
    let data = generate(&config).unwrap();
    let hist = cross_validate(&data, SimilarityMeasure::CosineDistance, 1, 1).unwrap();
    assert!(hist.total_trials() >= 10_000);
    let p = chi_square_uniform_pvalue(hist.counts());
    assert!(p > 0.001, "uniformity rejected, p = {p}");

    budget("C6 end-to-end pipeline", started, 60.0);
}

#[test]
fn c7_length_scaling() {
    let started = Instant::now();
    let config = SynthConfig {
        n_speakers: 64,
        obs_per_speaker: 40,
        dimension: 8,
        inter_speaker_sigma: 1.0,
        intra_speaker_sigma: 0.5,
        drift_per_segment: 0.15,
        feature_kind: FeatureKind::EmbeddingVector,
        seed: 2026,
    };
    let data = generate(&config).unwrap();
    let t_grid = [1usize, 2, 4, 8, 16, 24, 32];
    let d_grid = [1usize, 4];
    let scan = length_scan(&data, SimilarityMeasure::CosineDistance, &t_grid, &d_grid).unwrap();
    for &d in &d_grid {
        let row = scan.row(d);
        assert_eq!(row.len(), t_grid.len());
        let best = row
            .iter()
            .map(|c| c.mean_disclosure_bits)
            .fold(f64::NEG_INFINITY, f64::max);
        let last = row.last().unwrap().mean_disclosure_bits;
        assert!(
            last < best,
            "no roll-off along D={d}: last {last} vs max {best}"
        );
        for cell in &row {
            assert!(
                cell.mean_disclosure_bits <= cell.bound_linear_bits + 1e-12,
                "T={} D={d} exceeds the linear bound",
                cell.test_len
            );
        }
    }
    budget("C7 length scaling", started, 300.0);
}

#[test]
fn c8_goodness_of_fit_ordering() {
    let started = Instant::now();
    let truth = BetaBinomialModel::new(2.0, 8.0, 100).unwrap();
    let emp = sample_distribution(&truth, 100_000, 101);

    let mut kl = std::collections::HashMap::new();
    let mut rank1 = std::collections::HashMap::new();
    for kind in LossKind::ALL {
        let result = fit(&emp, &LossSpec::new(kind), &FitOptions::default()).unwrap();
        let (k, r1) = goodness_of_fit(&emp, &result.model).unwrap();
        kl.insert(kind.name(), k);
        rank1.insert(kind.name(), r1.expect("rank-1 mass present"));
    }
    for other in ["ms", "wms", "rwms"] {
        assert!(
            kl["ll"] <= kl[other] + 1e-6,
            "KL(ll) = {} above KL({other}) = {}",
            kl["ll"],
            kl[other]
        );
    }
    assert!(
        rank1["cll"] <= rank1["ll"],
        "rank-1 match: cll = {} vs ll = {}",
        rank1["cll"],
        rank1["ll"]
    );
    budget("C8 goodness-of-fit ordering", started, 60.0);
}

#[test]
fn c9_segment_indexing() {
    let started = Instant::now();
    let mut valid_plans = 0u64;
    for k in 2..=12usize {
        for t in 1..=k {
            for d in 1..=k {
                for s in 0..k {
                    let Ok(plan) = ExperimentPlan::single(k, t, d, s) else {
                        continue;
                    };
                    valid_plans += 1;
                    let (inputs, templates) = rankdisc::experiments::segment_indices(&plan);
                    assert_eq!(inputs.len(), t);
                    assert_eq!(templates.len(), d);
                    let delta = (k - s - t) / 2;
                    for (i, &v) in inputs.iter().enumerate() {
                        assert_eq!(v, (s + i) % k, "input formula K={k} S={s} T={t}");
                    }
                    for (i, &v) in templates.iter().enumerate() {
                        assert_eq!(
                            v,
                            (s + t + delta + i) % k,
                            "template formula K={k} S={s} T={t} D={d}"
                        );
                    }
                    for v in &templates {
                        assert!(!inputs.contains(v), "overlap at K={k} S={s} T={t} D={d}");
                    }
                }
            }
        }
    }
    assert!(
        valid_plans > 1000,
        "exhaustive sweep looks too small: {valid_plans}"
    );
    budget("C9 segment indexing", started, 1.0);
}
