//! Beta-binomial parameter estimation from an empirical rank distribution.
//!
//! Five objectives are available, all over the model pmf γ and the empirical
//! distribution p̃ (natural log inside the likelihood terms):
//!
//!   LL    −Σ p̃_k ln γ_k
//!   MS    Σ (p̃_k − γ_k)²
//!   WMS   Σ p̃_k (p̃_k − γ_k)²
//!   RWMS  Σ e^{−k} (p̃_k − γ_k)²          (k is the 1-based rank)
//!   CLL   LL + w (p̃_1 − γ_1)²            (w defaults to 1e5)
//!
//! The search runs Nelder-Mead on (ln α, ln β) from a fixed 3×3 grid of
//! starts, clipping the exponentiated parameters to the model box, so
//! positivity is structural rather than a constraint. Goodness-of-fit is
//! reported in bits: base-2 KL divergence and the rank-1 match.

use crate::betabinom::{BetaBinomialModel, PARAM_MAX, PARAM_MIN};
use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::rank::EmpiricalDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Ll,
    Ms,
    Wms,
    Rwms,
    Cll,
}

impl LossKind {
    pub fn name(&self) -> &'static str {
        match self {
            LossKind::Ll => "ll",
            LossKind::Ms => "ms",
            LossKind::Wms => "wms",
            LossKind::Rwms => "rwms",
            LossKind::Cll => "cll",
        }
    }

    pub const ALL: [LossKind; 5] = [
        LossKind::Ll,
        LossKind::Ms,
        LossKind::Wms,
        LossKind::Rwms,
        LossKind::Cll,
    ];
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ll" => Ok(LossKind::Ll),
            "ms" => Ok(LossKind::Ms),
            "wms" => Ok(LossKind::Wms),
            "rwms" => Ok(LossKind::Rwms),
            "cll" => Ok(LossKind::Cll),
            other => Err(Error::InvalidParameter(format!("unknown loss {other:?}"))),
        }
    }
}

pub const DEFAULT_CLL_PENALTY_WEIGHT: f64 = 1e5;

#[derive(Debug, Clone, Copy)]
pub struct LossSpec {
    pub kind: LossKind,
    /// Weight of the rank-1 penalty term; only used by CLL.
    pub cll_penalty_weight: f64,
}

impl LossSpec {
    pub fn new(kind: LossKind) -> Self {
        Self {
            kind,
            cll_penalty_weight: DEFAULT_CLL_PENALTY_WEIGHT,
        }
    }

    pub fn with_penalty_weight(kind: LossKind, weight: f64) -> Self {
        Self {
            kind,
            cll_penalty_weight: weight,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: BetaBinomialModel,
    pub loss_value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gof_kl_bits: f64,
    pub gof_rank1_bits: Option<f64>,
}

/// Evaluate the objective for a candidate model against the empirical
/// distribution. Terms with p̃_k = 0 contribute nothing to the likelihood
/// losses.
pub fn loss(
    emp: &EmpiricalDistribution,
    model: &BetaBinomialModel,
    spec: &LossSpec,
) -> Result<f64> {
    if emp.n_identities() != model.n_identities() {
        return Err(Error::DimensionMismatch {
            left: emp.n_identities(),
            right: model.n_identities(),
        });
    }
    let probs = emp.probs();
    let ln_gamma_all = model.ln_pmf_all();
    let value = match spec.kind {
        LossKind::Ll => negative_log_likelihood(probs, &ln_gamma_all),
        LossKind::Ms => ln_gamma_all
            .iter()
            .zip(probs)
            .map(|(lg, p)| (p - lg.exp()).powi(2))
            .sum(),
        LossKind::Wms => ln_gamma_all
            .iter()
            .zip(probs)
            .map(|(lg, p)| p * (p - lg.exp()).powi(2))
            .sum(),
        LossKind::Rwms => ln_gamma_all
            .iter()
            .zip(probs)
            .enumerate()
            .map(|(i, (lg, p))| (-((i + 1) as f64)).exp() * (p - lg.exp()).powi(2))
            .sum(),
        LossKind::Cll => {
            let penalty = spec.cll_penalty_weight * (probs[0] - ln_gamma_all[0].exp()).powi(2);
            negative_log_likelihood(probs, &ln_gamma_all) + penalty
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("loss"))
    }
}

fn negative_log_likelihood(probs: &[f64], ln_gamma_all: &[f64]) -> f64 {
    probs
        .iter()
        .zip(ln_gamma_all)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, lg)| -p * lg)
        .sum()
}

/// Base-2 KL divergence of the empirical distribution from the model, and
/// the rank-1 match |log2(p̃_1/γ_1)|. The rank-1 match is undefined when
/// p̃_1 = 0 and comes back as `None`.
pub fn goodness_of_fit(
    emp: &EmpiricalDistribution,
    model: &BetaBinomialModel,
) -> Result<(f64, Option<f64>)> {
    if emp.n_identities() != model.n_identities() {
        return Err(Error::DimensionMismatch {
            left: emp.n_identities(),
            right: model.n_identities(),
        });
    }
    let ln_gamma_all = model.ln_pmf_all();
    let mut kl = 0.0;
    for (p, lg) in emp.probs().iter().zip(&ln_gamma_all) {
        if *p > 0.0 {
            kl += p * (p.log2() - lg / std::f64::consts::LN_2);
        }
    }
    let kl = kl.max(0.0);
    let p1 = emp.probs()[0];
    let rank1 = if p1 > 0.0 {
        Some((p1.log2() - ln_gamma_all[0] / std::f64::consts::LN_2).abs())
    } else {
        None
    };
    Ok((kl, rank1))
}

/// Multi-start positions in (ln α, ln β).
const START_GRID: [f64; 3] = [-2.0, 0.0, 2.0];

/// Fit (α, β) by minimizing the objective with Nelder-Mead in log-parameter
/// space from nine grid starts; the best final loss wins, with ties broken
/// by iteration count and then lexicographic (α, β). Fails only if every
/// start ends at a non-finite loss.
pub fn fit(
    emp: &EmpiricalDistribution,
    spec: &LossSpec,
    options: &FitOptions,
) -> Result<FitResult> {
    let n = emp.n_identities();
    let clamp = |v: f64| v.exp().clamp(PARAM_MIN, PARAM_MAX);
    let objective = |x: &[f64]| -> f64 {
        match BetaBinomialModel::new(clamp(x[0]), clamp(x[1]), n) {
            Ok(model) => loss(emp, &model, spec).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };
    let nm_opts = NelderMeadOptions {
        max_iters: options.max_iters,
        tol: options.tol,
        step: 1.0,
    };

    let mut best: Option<(f64, usize, f64, f64, bool)> = None;
    for ln_alpha in START_GRID {
        for ln_beta in START_GRID {
            let run = nelder_mead(objective, &[ln_alpha, ln_beta], &nm_opts);
            if !run.value.is_finite() {
                continue;
            }
            let alpha = clamp(run.x[0]);
            let beta = clamp(run.x[1]);
            let candidate = (run.value, run.iterations, alpha, beta, run.converged);
            let better = match &best {
                None => true,
                Some(b) => {
                    (candidate.0, candidate.1, candidate.2, candidate.3) < (b.0, b.1, b.2, b.3)
                }
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    let (loss_value, iterations, alpha, beta, converged) =
        best.ok_or_else(|| Error::Convergence("no start reached a finite loss".into()))?;
    let model = BetaBinomialModel::new(alpha, beta, n)?;
    let (gof_kl_bits, gof_rank1_bits) = goodness_of_fit(emp, &model)?;
    Ok(FitResult {
        model,
        loss_value,
        converged,
        iterations,
        gof_kl_bits,
        gof_rank1_bits,
    })
}
