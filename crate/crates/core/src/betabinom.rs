//! The parametric rank-distribution model.
//!
//! The true identity's similarity rank over a database of N templates is
//! modeled as 1 + J where J is beta-binomial over n = N − 1 trials: the
//! per-template win probability θ is drawn from Beta(α, β) and J counts
//! wins, giving
//!
//!   P[rank = j + 1] = C(n, j) · B(j + α, n − j + β) / B(α, β).
//!
//! All pmf arithmetic stays in natural-log space and is exponentiated once;
//! conversion to bits happens in the metrics module.

use rand::Rng;
use rand_distr::{Beta, Binomial, Distribution};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Lower edge of the (α, β) parameter box.
pub const PARAM_MIN: f64 = 1e-3;
/// Upper edge of the (α, β) parameter box.
pub const PARAM_MAX: f64 = 1e4;

/// ln B(a, b) via log-gamma; finite across the whole parameter box.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() || a <= 0.0 || b <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "ln_beta requires positive arguments, got ({a}, {b})"
        )));
    }
    Ok(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))
}

/// Product of win probabilities, evaluated in log space so that long
/// sequences do not underflow.
pub fn prob_best_match(thetas: &[f64]) -> Result<f64> {
    let mut ln_product = 0.0f64;
    for &theta in thetas {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta {theta} outside [0, 1]"
            )));
        }
        ln_product += theta.ln();
    }
    Ok(ln_product.exp())
}

/// Beta-binomial model of the true identity's rank over 1..=N.
#[derive(Debug, Clone)]
pub struct BetaBinomialModel {
    alpha: f64,
    beta: f64,
    n_identities: usize,
    // cached constants shared by every pmf evaluation
    ln_beta_ab: f64,
    ln_gamma_trials_plus_one: f64,
    ln_gamma_all: f64,
}

impl BetaBinomialModel {
    pub fn new(alpha: f64, beta: f64, n_identities: usize) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::NonFinite("model parameters"));
        }
        if !(PARAM_MIN..=PARAM_MAX).contains(&alpha) || !(PARAM_MIN..=PARAM_MAX).contains(&beta) {
            return Err(Error::InvalidParameter(format!(
                "(alpha, beta) = ({alpha}, {beta}) outside [{PARAM_MIN}, {PARAM_MAX}]"
            )));
        }
        if n_identities < 2 {
            return Err(Error::InvalidParameter("need at least 2 identities".into()));
        }
        let trials = (n_identities - 1) as f64;
        Ok(Self {
            alpha,
            beta,
            n_identities,
            ln_beta_ab: ln_beta(alpha, beta)?,
            ln_gamma_trials_plus_one: ln_gamma(trials + 1.0),
            ln_gamma_all: ln_gamma(trials + alpha + beta),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_identities(&self) -> usize {
        self.n_identities
    }

    /// Number of binomial trials, N − 1.
    pub fn trials(&self) -> usize {
        self.n_identities - 1
    }

    fn ln_pmf_at(&self, rank: usize) -> f64 {
        let j = (rank - 1) as f64;
        let n = self.trials() as f64;
        let ln_choose = self.ln_gamma_trials_plus_one - ln_gamma(j + 1.0) - ln_gamma(n - j + 1.0);
        let ln_beta_num =
            ln_gamma(j + self.alpha) + ln_gamma(n - j + self.beta) - self.ln_gamma_all;
        ln_choose + ln_beta_num - self.ln_beta_ab
    }

    /// Natural log of the rank probability.
    pub fn ln_pmf(&self, rank: usize) -> Result<f64> {
        if rank < 1 || rank > self.n_identities {
            return Err(Error::IndexOutOfRange {
                index: rank,
                len: self.n_identities,
            });
        }
        Ok(self.ln_pmf_at(rank))
    }

    /// Probability that the true identity attains the given rank.
    pub fn pmf(&self, rank: usize) -> Result<f64> {
        Ok(self.ln_pmf(rank)?.exp())
    }

    pub fn ln_pmf_all(&self) -> Vec<f64> {
        (1..=self.n_identities).map(|r| self.ln_pmf_at(r)).collect()
    }

    /// pmf over every rank 1..=N; sums to 1.
    pub fn pmf_all(&self) -> Vec<f64> {
        (1..=self.n_identities)
            .map(|r| self.ln_pmf_at(r).exp())
            .collect()
    }

    /// Analytic mean rank, 1 + (N − 1)·α/(α + β).
    pub fn mean_rank(&self) -> f64 {
        1.0 + self.trials() as f64 * self.alpha / (self.alpha + self.beta)
    }

    /// Draw a rank: θ ~ Beta(α, β), then 1 + Binomial(N − 1, θ).
    pub fn sample_rank<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let theta = Beta::new(self.alpha, self.beta)
            .expect("validated parameters")
            .sample(rng)
            .clamp(0.0, 1.0);
        let j = Binomial::new(self.trials() as u64, theta)
            .expect("theta in [0, 1]")
            .sample(rng);
        j as usize + 1
    }
}

/// Flat key-value persistence of a fitted model, including its
/// goodness-of-fit. The rank-1 match is omitted when the empirical rank-1
/// probability was zero, where the measure is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub alpha: f64,
    pub beta: f64,
    pub n_identities: usize,
    pub loss_name: String,
    pub kl_divergence_bits: f64,
    pub rank1_match_bits: Option<f64>,
    pub cll_penalty_weight: Option<f64>,
}

impl ModelDocument {
    pub fn model(&self) -> Result<BetaBinomialModel> {
        BetaBinomialModel::new(self.alpha, self.beta, self.n_identities)
    }

    pub fn to_document_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("alpha = {}\n", self.alpha));
        out.push_str(&format!("beta = {}\n", self.beta));
        out.push_str(&format!("n_identities = {}\n", self.n_identities));
        out.push_str(&format!("loss_name = {}\n", self.loss_name));
        out.push_str(&format!(
            "kl_divergence_bits = {}\n",
            self.kl_divergence_bits
        ));
        if let Some(r1) = self.rank1_match_bits {
            out.push_str(&format!("rank1_match_bits = {r1}\n"));
        }
        if let Some(w) = self.cll_penalty_weight {
            out.push_str(&format!("cll_penalty_weight = {w}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut alpha = None;
        let mut beta = None;
        let mut n_identities = None;
        let mut loss_name = None;
        let mut kl = None;
        let mut rank1 = None;
        let mut cll_weight = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let line_no = idx + 1;
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let parse_f64 = |v: &str| {
                v.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad number {v:?}"),
                })
            };
            match key {
                "alpha" => alpha = Some(parse_f64(value)?),
                "beta" => beta = Some(parse_f64(value)?),
                "n_identities" => {
                    n_identities = Some(value.parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("bad integer {value:?}"),
                    })?)
                }
                "loss_name" => loss_name = Some(value.to_string()),
                "kl_divergence_bits" => kl = Some(parse_f64(value)?),
                "rank1_match_bits" => rank1 = Some(parse_f64(value)?),
                "cll_penalty_weight" => cll_weight = Some(parse_f64(value)?),
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        let missing = |name: &str| Error::Document(format!("missing field {name}"));
        Ok(Self {
            alpha: alpha.ok_or_else(|| missing("alpha"))?,
            beta: beta.ok_or_else(|| missing("beta"))?,
            n_identities: n_identities.ok_or_else(|| missing("n_identities"))?,
            loss_name: loss_name.ok_or_else(|| missing("loss_name"))?,
            kl_divergence_bits: kl.ok_or_else(|| missing("kl_divergence_bits"))?,
            rank1_match_bits: rank1,
            cll_penalty_weight: cll_weight,
        })
    }
}
