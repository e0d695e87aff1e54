//! Join measured error rates to the closed-form bounds and flag validity.
//!
//! Exact rates are compared with no statistical slack; Monte Carlo rates
//! get a `3 × half_width` allowance on each comparison. Every comparison
//! additionally carries a 1e-12 absolute grace: some instances satisfy a
//! bound with exact equality (mirrored Bernoulli pairs at c = 0, n = 1 are
//! tight for the mean-gap inequality), and the two sides then differ by
//! route-dependent rounding of the order of ulps.

use serde::{Deserialize, Serialize};

use crate::bounds::{gap_bound, BinaryBoundReport, MaryBoundReport};
use crate::error::{Error, Result};
use crate::testing::{ConfusionResult, ErrorRates, EstimateMode};

/// Validity record for one binary instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryCheck {
    pub sum_alpha_beta: f64,
    pub subgauss_bound: f64,
    pub pinsker_bound: f64,
    /// Measured `|E_0 Φ - E_1 Φ| = |α + β - 1|`.
    pub mean_gap: f64,
    /// Admissible gap `σ_Φ0(α)·sqrt(2n·kl_10)`.
    pub gap_bound: f64,
    /// Comparison allowance: 0 exact, `3·half_width` Monte Carlo.
    pub slack: f64,
    /// `α + β ≥ 1 - σ_Φ0(α)·sqrt(2n·kl_10)`.
    pub sum_ge_subgauss: bool,
    /// `α + β ≥ 1 - sqrt(n·kl_10/2)`.
    pub sum_ge_pinsker: bool,
    /// `|E_0 Φ - E_1 Φ| ≤ gap_bound`.
    pub gap_within_bound: bool,
}

impl BinaryCheck {
    pub fn all_valid(&self) -> bool {
        self.sum_ge_subgauss && self.sum_ge_pinsker && self.gap_within_bound
    }
}

/// Validity record for one M-ary instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaryCheck {
    pub alpha_max: f64,
    pub slack: f64,
    /// Largest per-reference bound with the universal σ = 0.5.
    pub per_reference_max: f64,
    /// Largest per-reference bound with measured per-hypothesis norms.
    pub aposteriori_max: Option<f64>,
    pub mean_sqrt: f64,
    pub uniform_delta: f64,
    pub fano: Option<f64>,
    pub alpha_max_ge_per_reference: bool,
    pub alpha_max_ge_aposteriori: Option<bool>,
    pub alpha_max_ge_mean_sqrt: bool,
    pub alpha_max_ge_uniform_delta: bool,
    /// `None` when Fano does not apply (M = 2).
    pub alpha_max_ge_fano: Option<bool>,
}

impl MaryCheck {
    pub fn all_valid(&self) -> bool {
        self.alpha_max_ge_per_reference
            && self.alpha_max_ge_aposteriori.unwrap_or(true)
            && self.alpha_max_ge_mean_sqrt
            && self.alpha_max_ge_uniform_delta
            && self.alpha_max_ge_fano.unwrap_or(true)
    }
}

/// Grace for exact-tie instances computed along two float routes.
const FLOAT_GRACE: f64 = 1e-12;

fn slack_for(mode: EstimateMode, half_width: f64) -> f64 {
    match mode {
        EstimateMode::Exact => 0.0,
        EstimateMode::MonteCarlo => 3.0 * half_width,
    }
}

/// Check a binary instance against its bound report.
pub fn verify_binary(rates: &ErrorRates, report: &BinaryBoundReport) -> BinaryCheck {
    let slack = slack_for(rates.mode, rates.half_width);
    let sum = rates.alpha + rates.beta;
    let mean_gap = (rates.alpha - (1.0 - rates.beta)).abs();
    let gap = gap_bound(report.sigma_used, report.kl_10, report.n);
    BinaryCheck {
        sum_alpha_beta: sum,
        subgauss_bound: report.subgauss,
        pinsker_bound: report.pinsker,
        mean_gap,
        gap_bound: gap,
        slack,
        sum_ge_subgauss: sum + slack >= report.subgauss - FLOAT_GRACE,
        sum_ge_pinsker: sum + slack >= report.pinsker - FLOAT_GRACE,
        gap_within_bound: mean_gap <= gap + slack + FLOAT_GRACE,
    }
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Check an M-ary instance against its bound reports.
///
/// The per-reference bound holds for every reference index, so the
/// measured `alpha_max` is compared against the largest entry.
/// `aposteriori`, when given, is the same report recomputed with the
/// measured per-hypothesis error rates feeding the norms.
pub fn verify_mary(
    result: &ConfusionResult,
    relaxed: &MaryBoundReport,
    aposteriori: Option<&MaryBoundReport>,
) -> Result<MaryCheck> {
    let m = result.alpha_vector.len();
    if relaxed.m != m {
        return Err(Error::Domain(format!(
            "bound report is for M = {}, confusion result has M = {m}",
            relaxed.m
        )));
    }
    if let Some(ap) = aposteriori {
        if ap.m != m {
            return Err(Error::Domain(format!(
                "a-posteriori report is for M = {}, confusion result has M = {m}",
                ap.m
            )));
        }
    }
    let slack = slack_for(result.mode, result.half_width);
    let a = result.alpha_max;
    let per_reference_max = max_of(&relaxed.per_reference);
    let aposteriori_max = aposteriori.map(|r| max_of(&r.per_reference));
    Ok(MaryCheck {
        alpha_max: a,
        slack,
        per_reference_max,
        aposteriori_max,
        mean_sqrt: relaxed.mean_sqrt,
        uniform_delta: relaxed.uniform_delta,
        fano: relaxed.fano,
        alpha_max_ge_per_reference: a + slack >= per_reference_max - FLOAT_GRACE,
        alpha_max_ge_aposteriori: aposteriori_max.map(|b| a + slack >= b - FLOAT_GRACE),
        alpha_max_ge_mean_sqrt: a + slack >= relaxed.mean_sqrt - FLOAT_GRACE,
        alpha_max_ge_uniform_delta: a + slack >= relaxed.uniform_delta - FLOAT_GRACE,
        alpha_max_ge_fano: relaxed.fano.map(|b| a + slack >= b - FLOAT_GRACE),
    })
}
