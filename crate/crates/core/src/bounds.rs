//! Closed-form error bounds for binary and M-ary hypothesis testing.
//!
//! Binary: the Pinsker bound `α + β ≥ 1 - sqrt(n·D/2)` and its sub-Gaussian
//! sharpening `α + β ≥ 1 - σ_Φ0(α)·sqrt(2nD)` with `D = D_KL(P_1 ‖ P_0)`,
//! plus the mirrored implicit variant that constrains `β` through its own
//! norm and `D_KL(P_0 ‖ P_1)`.
//!
//! M-ary: the per-reference bound
//! `α_max ≥ 1 - 1/M - (1/M) Σ_i σ_i sqrt(2n·D_KL(P_j ‖ P_i))`, its
//! mean-square-root and uniform-δ relaxations, and Fano's inequality
//! `α_max ≥ 1 - (nδ + ln 2)/ln(M-1)` for comparison.
//!
//! Bounds are reported raw: a negative value simply means the bound is
//! uninformative there, and clamping would hide exactly the regions the
//! dominance comparison is about.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subgauss::{solve_norm, DEFAULT_TOL};

/// Default grid step for the implicit-β scan.
pub const DEFAULT_RESOLUTION: f64 = 1e-4;

/// Side-by-side binary bounds at a given type I error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryBoundReport {
    pub alpha: f64,
    pub n: u64,
    /// D_KL(P_1 ‖ P_0) in nats.
    pub kl_10: f64,
    /// D_KL(P_0 ‖ P_1) in nats, when known.
    pub kl_01: Option<f64>,
    /// RHS of the Pinsker bound.
    pub pinsker: f64,
    /// RHS of the sub-Gaussian bound, raw (may be negative).
    pub subgauss: f64,
    /// subgauss - alpha, clamped to [0, 1].
    pub beta_floor: f64,
    /// The solved norm σ_Φ0(alpha).
    pub sigma_used: f64,
}

/// M-ary bounds evaluated on a KL matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaryBoundReport {
    pub m: usize,
    pub n: u64,
    /// Entry (j, i) = D_KL(P_j ‖ P_i).
    pub kl_matrix: Vec<Vec<f64>>,
    /// Per-reference-index bound; σ_i = 0.5 unless per-hypothesis alphas
    /// were supplied.
    pub per_reference: Vec<f64>,
    /// Mean-square-root relaxation.
    pub mean_sqrt: f64,
    /// Uniform-δ relaxation at δ = max off-diagonal KL.
    pub uniform_delta: f64,
    /// Fano's bound; `None` for M = 2 where ln(M-1) vanishes.
    pub fano: Option<f64>,
    /// Max off-diagonal KL used by `uniform_delta` and `fano`.
    pub delta: f64,
}

/// Which bound wins a (M, n) cell of the dominance map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Subgauss,
    Fano,
    Tie,
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Winner::Subgauss => write!(f, "subgauss"),
            Winner::Fano => write!(f, "fano"),
            Winner::Tie => write!(f, "tie"),
        }
    }
}

/// One cell of the dominance map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceRow {
    pub m: usize,
    pub n: u64,
    pub uniform_delta: f64,
    pub fano: f64,
    pub winner: Winner,
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("sample size n must be at least 1".into()));
    }
    Ok(())
}

fn check_kl(kl: f64, what: &str) -> Result<()> {
    if kl.is_nan() || kl < 0.0 {
        return Err(Error::Domain(format!(
            "{what} must be nonnegative, got {kl}"
        )));
    }
    Ok(())
}

/// Pinsker: `1 - sqrt(n·kl_10 / 2)`. May be negative (uninformative);
/// `-∞` when the divergence is infinite.
pub fn pinsker_binary(n: u64, kl_10: f64) -> Result<f64> {
    check_n(n)?;
    check_kl(kl_10, "kl_10")?;
    Ok(1.0 - (n as f64 * kl_10 / 2.0).sqrt())
}

/// Sub-Gaussian binary bound `1 - σ_Φ0(α)·sqrt(2n·kl_10)`, reported next
/// to Pinsker.
pub fn subgauss_binary(alpha: f64, n: u64, kl_10: f64) -> Result<BinaryBoundReport> {
    check_n(n)?;
    check_kl(kl_10, "kl_10")?;
    let sigma = solve_norm(alpha, DEFAULT_TOL)?.sigma;
    let subgauss = 1.0 - sigma * (2.0 * n as f64 * kl_10).sqrt();
    Ok(BinaryBoundReport {
        alpha,
        n,
        kl_10,
        kl_01: None,
        pinsker: pinsker_binary(n, kl_10)?,
        subgauss,
        beta_floor: (subgauss - alpha).clamp(0.0, 1.0),
        sigma_used: sigma,
    })
}

/// Implicit β floor from the mirrored bound
/// `α + β ≥ 1 - σ_Φ0(β)·sqrt(2n·kl_01)`.
///
/// The constraint is implicit in β (the norm depends on it), so the
/// feasible set is found by exhaustive scan of the grid
/// `{0, resolution, …, 1}` from below; the first qualifying β is returned,
/// 0 when the bound is vacuous.
pub fn subgauss_binary_symmetric(alpha: f64, n: u64, kl_01: f64, resolution: f64) -> Result<f64> {
    check_n(n)?;
    check_kl(kl_01, "kl_01")?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(Error::Domain(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let scale = (2.0 * n as f64 * kl_01).sqrt();
    let steps = (1.0 / resolution).ceil() as u64;
    for k in 0..=steps {
        let beta = (k as f64 * resolution).min(1.0);
        let sigma = solve_norm(beta, DEFAULT_TOL)?.sigma;
        if alpha + beta >= 1.0 - sigma * scale {
            return Ok(beta);
        }
    }
    // alpha + 1 >= 1 always holds, so the scan cannot fall through.
    Ok(1.0)
}

/// Admissible mean gap `σ·sqrt(2n·kl)` between `E_{P_0}Φ` and `E_{P_1}Φ`.
pub fn gap_bound(sigma: f64, kl: f64, n: u64) -> f64 {
    sigma * (2.0 * n as f64 * kl).sqrt()
}

fn validate_kl_matrix(kl_matrix: &[Vec<f64>]) -> Result<usize> {
    let m = kl_matrix.len();
    if m < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 hypotheses, got {m}"
        )));
    }
    for (j, row) in kl_matrix.iter().enumerate() {
        if row.len() != m {
            return Err(Error::Domain(format!(
                "kl matrix is not square: row {j} has {} entries, expected {m}",
                row.len()
            )));
        }
        for (i, &v) in row.iter().enumerate() {
            if v.is_nan() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "kl matrix entry ({j}, {i}) must be nonnegative, got {v}"
                )));
            }
            if i == j && v != 0.0 {
                return Err(Error::Domain(format!(
                    "kl matrix diagonal entry {j} must be 0, got {v}"
                )));
            }
        }
    }
    Ok(m)
}

/// Evaluate every M-ary bound on a KL matrix with entry
/// `(j, i) = D_KL(P_j ‖ P_i)`.
///
/// With `alphas` supplied, `per_reference` uses the per-hypothesis norms
/// σ_Φ0(α_i) (the a-posteriori form); otherwise the universal σ = 0.5.
pub fn mary_bounds(
    kl_matrix: &[Vec<f64>],
    n: u64,
    alphas: Option<&[f64]>,
) -> Result<MaryBoundReport> {
    check_n(n)?;
    let m = validate_kl_matrix(kl_matrix)?;
    let sigmas: Vec<f64> = match alphas {
        Some(a) => {
            if a.len() != m {
                return Err(Error::Domain(format!(
                    "alphas has {} entries, expected {m}",
                    a.len()
                )));
            }
            a.iter()
                .map(|&ai| solve_norm(ai, DEFAULT_TOL).map(|fit| fit.sigma))
                .collect::<Result<_>>()?
        }
        None => vec![0.5; m],
    };

    let mf = m as f64;
    let nf = n as f64;
    let per_reference: Vec<f64> = (0..m)
        .map(|j| {
            let sum: f64 = (0..m)
                .map(|i| sigmas[i] * (2.0 * nf * kl_matrix[j][i]).sqrt())
                .sum();
            1.0 - 1.0 / mf - sum / mf
        })
        .collect();

    let sqrt_sum: f64 = kl_matrix
        .iter()
        .flat_map(|row| row.iter())
        .map(|&d| (nf * d / 2.0).sqrt())
        .sum();
    let mean_sqrt = 1.0 - 1.0 / mf - sqrt_sum / (mf * mf);

    let delta = kl_matrix
        .iter()
        .enumerate()
        .flat_map(|(j, row)| {
            row.iter()
                .enumerate()
                .filter(move |(i, _)| *i != j)
                .map(|(_, &v)| v)
        })
        .fold(0.0f64, f64::max);
    let uniform_delta = 1.0 - 1.0 / mf - (nf * delta / 2.0).sqrt();

    let fano = if m == 2 {
        None
    } else {
        Some(1.0 - (nf * delta + std::f64::consts::LN_2) / (mf - 1.0).ln())
    };

    Ok(MaryBoundReport {
        m,
        n,
        kl_matrix: kl_matrix.to_vec(),
        per_reference,
        mean_sqrt,
        uniform_delta,
        fano,
        delta,
    })
}

/// Fano's bound at a uniform KL cap δ; requires M ≥ 3.
pub fn fano_bound(m: usize, n: u64, delta: f64) -> Result<f64> {
    if m < 3 {
        return Err(Error::Domain(format!(
            "fano needs at least 3 hypotheses, got {m}"
        )));
    }
    check_n(n)?;
    check_kl(delta, "delta")?;
    Ok(1.0 - (n as f64 * delta + std::f64::consts::LN_2) / ((m - 1) as f64).ln())
}

/// Uniform-δ sub-Gaussian bound `1 - 1/M - sqrt(nδ/2)`.
pub fn uniform_delta_bound(m: usize, n: u64, delta: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 hypotheses, got {m}"
        )));
    }
    check_n(n)?;
    check_kl(delta, "delta")?;
    Ok(1.0 - 1.0 / m as f64 - (n as f64 * delta / 2.0).sqrt())
}

/// Compare the uniform-δ sub-Gaussian bound against Fano over an (M, n)
/// grid. Requires every M ≥ 3 so Fano is defined.
pub fn dominance_map(
    m_values: &[usize],
    n_values: &[u64],
    delta: f64,
) -> Result<Vec<DominanceRow>> {
    check_kl(delta, "delta")?;
    let mut rows = Vec::with_capacity(m_values.len() * n_values.len());
    for &m in m_values {
        for &n in n_values {
            let ud = uniform_delta_bound(m, n, delta)?;
            let fano = fano_bound(m, n, delta)?;
            let winner = if ud > fano {
                Winner::Subgauss
            } else if fano > ud {
                Winner::Fano
            } else {
                Winner::Tie
            };
            rows.push(DominanceRow {
                m,
                n,
                uniform_delta: ud,
                fano,
                winner,
            });
        }
    }
    Ok(rows)
}
