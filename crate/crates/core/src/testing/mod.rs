//! Likelihood-based test functions and their error rates.
//!
//! The binary test rejects the null when the per-sample average
//! log-likelihood ratio `(1/n) Σ ln(p_1(x_i)/p_0(x_i))` exceeds a threshold
//! `c ≥ 0`; the M-ary classifier picks the hypothesis with maximal
//! log-likelihood. Error rates come from two interchangeable engines: exact
//! enumeration of multinomial count vectors for finite alphabets
//! ([`exact_binary`], [`confusion_matrix`] in exact mode) and seeded,
//! partition-invariant Monte Carlo ([`simulate_binary`], Monte Carlo
//! confusion mode). [`verify_binary`] / [`verify_mary`] join the measured
//! rates to the closed-form bounds.
//!
//! Conventions fixed here because they are observable on discrete laws:
//! the rejection inequality is strict (a statistic exactly equal to `c`
//! accepts the null), `+∞` statistics always reject and `-∞` never do,
//! and M-ary likelihood ties break toward the lowest hypothesis index
//! while being counted and reported.

mod exact;
mod mc;
mod verify;

pub use exact::{exact_binary, MAX_EXACT_STATES};
pub use mc::{simulate_binary, CHUNK_TRIALS};
pub use verify::{verify_binary, verify_mary, BinaryCheck, MaryCheck};

use serde::{Deserialize, Serialize};

use crate::distributions::{Distribution, Sample};
use crate::error::{Error, Result};

/// Threshold and sample size of the binary test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryTestConfig {
    c: f64,
    n: u64,
}

impl BinaryTestConfig {
    pub fn new(c: f64, n: u64) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::Domain(format!(
                "threshold c must be nonnegative, got {c}"
            )));
        }
        if n == 0 {
            return Err(Error::Domain("sample size n must be at least 1".into()));
        }
        Ok(Self { c, n })
    }

    /// Threshold in nats per sample.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// The equivalent raw likelihood-ratio threshold `c' = e^{cn}`.
    pub fn c_prime(&self) -> f64 {
        (self.c * self.n as f64).exp()
    }
}

/// How a pair of error rates was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    Exact,
    MonteCarlo,
}

/// Type I / type II error rates of a binary test.
///
/// `half_width` is the larger of the two 95% normal-approximation interval
/// half-widths `1.96·sqrt(p̂(1-p̂)/trials)` (floored at `1.96/trials` for
/// degenerate `p̂ ∈ {0, 1}`); it is 0 in exact mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub alpha: f64,
    pub beta: f64,
    pub mode: EstimateMode,
    pub trials: u64,
    pub half_width: f64,
}

/// Histogram of a discrete sample: the sufficient statistic for
/// categorical data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCounts {
    counts: Vec<u64>,
}

impl EmpiricalCounts {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::Domain("counts must sum to at least 1".into()));
        }
        Ok(Self { counts })
    }

    /// Tally a sample over the alphabet `0..k`.
    pub fn from_sample(x: &Sample, k: usize) -> Result<Self> {
        let mut counts = vec![0u64; k];
        for &v in x.values() {
            if v.fract() != 0.0 || v < 0.0 || v >= k as f64 {
                return Err(Error::Domain(format!(
                    "observation {v} is not a symbol in 0..{k}"
                )));
            }
            counts[v as usize] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Outcome of the M-ary classifier on one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// Argmax hypothesis; the lowest index on a tie.
    pub index: usize,
    pub tie: bool,
}

/// Row-stochastic decision matrix: `probs[i][j]` estimates the probability
/// of deciding hypothesis `j` when the data come from hypothesis `i`.
///
/// `tie_counts[i]` counts tie events: tied trials for row `i` in Monte
/// Carlo mode, and (identically for every row) the number of enumerated
/// count vectors with tied likelihoods in exact mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub probs: Vec<Vec<f64>>,
    pub tie_counts: Vec<u64>,
}

/// Confusion matrix plus the per-hypothesis error rates derived from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionResult {
    pub matrix: ConfusionMatrix,
    /// `alpha_vector[i] = 1 - probs[i][i]`.
    pub alpha_vector: Vec<f64>,
    pub alpha_max: f64,
    pub mode: EstimateMode,
    pub trials: u64,
    /// Largest per-row interval half-width (0 in exact mode).
    pub half_width: f64,
}

/// Engine selector for [`confusion_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfusionMode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

/// KL-difference statistic `(1/n) Σ_i [ln p_1(x_i) - ln p_0(x_i)]`.
///
/// `±∞` is permitted when exactly one hypothesis assigns zero mass
/// somewhere in the sample; a sample that is impossible under both product
/// laws is an error.
pub fn lrt_statistic(x: &Sample, p0: &Distribution, p1: &Distribution) -> Result<f64> {
    lrt_statistic_values(x.values(), p0, p1)
}

pub(crate) fn lrt_statistic_values(
    values: &[f64],
    p0: &Distribution,
    p1: &Distribution,
) -> Result<f64> {
    let mut finite_sum = 0.0;
    let mut pos_inf = false;
    let mut neg_inf = false;
    for &xi in values {
        let l0 = p0.log_density(xi);
        let l1 = p1.log_density(xi);
        match (l0 == f64::NEG_INFINITY, l1 == f64::NEG_INFINITY) {
            (true, true) => {
                return Err(Error::OutsideSupport(format!(
                    "observation {xi} has zero density under both hypotheses"
                )))
            }
            (true, false) => pos_inf = true,
            (false, true) => neg_inf = true,
            (false, false) => finite_sum += l1 - l0,
        }
    }
    match (pos_inf, neg_inf) {
        (true, true) => Err(Error::OutsideSupport(
            "sample is impossible under both product laws".into(),
        )),
        (true, false) => Ok(f64::INFINITY),
        (false, true) => Ok(f64::NEG_INFINITY),
        (false, false) => Ok(finite_sum / values.len() as f64),
    }
}

/// The binary test function: `true` (reject the null) iff the statistic
/// strictly exceeds `cfg.c`.
pub fn phi(
    x: &Sample,
    p0: &Distribution,
    p1: &Distribution,
    cfg: &BinaryTestConfig,
) -> Result<bool> {
    Ok(lrt_statistic(x, p0, p1)? > cfg.c)
}

/// Maximum-likelihood M-ary decision (all thresholds zero).
pub fn classify_mary(x: &Sample, hypotheses: &[Distribution]) -> Result<Classification> {
    classify_values(x.values(), hypotheses)
}

pub(crate) fn classify_values(
    values: &[f64],
    hypotheses: &[Distribution],
) -> Result<Classification> {
    if hypotheses.len() < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 hypotheses, got {}",
            hypotheses.len()
        )));
    }
    let mut best = f64::NEG_INFINITY;
    let mut index = 0usize;
    let mut tie = false;
    for (i, h) in hypotheses.iter().enumerate() {
        let loglik: f64 = values.iter().map(|&xi| h.log_density(xi)).sum();
        if loglik > best {
            best = loglik;
            index = i;
            tie = false;
        } else if loglik == best && best > f64::NEG_INFINITY {
            tie = true;
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::OutsideSupport(
            "sample has zero density under every hypothesis".into(),
        ));
    }
    Ok(Classification { index, tie })
}

/// Decision matrix of the M-ary classifier, by exact enumeration or by
/// seeded Monte Carlo.
pub fn confusion_matrix(
    hypotheses: &[Distribution],
    n: u64,
    mode: ConfusionMode,
) -> Result<ConfusionResult> {
    match mode {
        ConfusionMode::Exact => exact::exact_confusion(hypotheses, n),
        ConfusionMode::MonteCarlo { trials, seed } => mc::mc_confusion(hypotheses, n, trials, seed),
    }
}
