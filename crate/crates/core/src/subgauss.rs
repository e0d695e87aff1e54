//! Sub-Gaussian norm of the binary test indicator under the null.
//!
//! A `{0, 1}` indicator with mean `α` has centered log-MGF
//! `f(s) = ln(α e^{s(1-α)} + (1-α) e^{-sα})`. Its sub-Gaussian norm is the
//! smallest `σ` with `f(s) ≤ σ²s²/2` for all real `s`; equivalently the
//! `(σ, s*)` at which `h(s) = f(s) - σ²s²/2` is tangent to zero:
//!
//! ```text
//! f(s*)  = σ² s*² / 2
//! f'(s*) = σ² s*
//! ```
//!
//! [`solve_norm`] eliminates `σ` between the two lines (the second gives
//! `σ² = f'(s)/s`) and bisects the scalar residual
//! `r(s) = f(s) - (s/2) f'(s)` on `s > 0`, where it changes sign exactly
//! once for `0 < α < 0.5`: the third cumulant `α(1-α)(1-2α)` is positive,
//! so `r < 0` near the origin, while `r → +∞` with `s`. The norm is then
//! `σ = sqrt(f'(s*)/s*)`. The cases `α ∈ {0, 1}` (almost-surely constant
//! indicator, norm 0), `α = 0.5` (norm exactly 0.5), and `α > 0.5`
//! (mirror of `1-α`) are dispatched directly.
//!
//! All MGF arithmetic stays in log space: for `s ≥ 0`,
//! `f(s) = s(1-α) + ln(α + (1-α) e^{-s})` and mirrored for `s < 0`, so the
//! tangency point can grow without overflow as `α → 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance on the tangency residual.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Alphas below this are treated as exactly 0 (and mirrored above 1 - cutoff):
/// past it the tangency point would blow through the bracket cap while the
/// norm itself is indistinguishable from the degenerate case downstream.
pub const TINY_ALPHA: f64 = 1e-12;

/// The bracket expansion gives up once `s` exceeds this.
pub const BRACKET_CAP: f64 = 1e6;

const MAX_BISECT_ITERS: u32 = 200;

/// A solved sub-Gaussian norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubGaussFit {
    /// The type I error the norm was solved for.
    pub alpha: f64,
    /// The norm σ_Φ0(α), in [sqrt(α(1-α)), 0.5].
    pub sigma: f64,
    /// Nontrivial tangency point, 0 for α ∈ {0, 0.5, 1}.
    pub s_star: f64,
    /// |r(s*)| at convergence.
    pub residual: f64,
    /// Bisection iterations performed.
    pub iterations: u32,
}

fn check_open_unit(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// Centered log-MGF `f(s) = ln(α e^{s(1-α)} + (1-α) e^{-sα})`.
pub fn log_mgf_centered(alpha: f64, s: f64) -> Result<f64> {
    check_open_unit(alpha)?;
    if !s.is_finite() {
        return Err(Error::Domain(format!("s must be finite, got {s}")));
    }
    Ok(f_centered(alpha, s))
}

/// Derivative `∂f/∂s = -α + α e^s / (1 - α + α e^s)`.
pub fn log_mgf_derivative(alpha: f64, s: f64) -> Result<f64> {
    check_open_unit(alpha)?;
    if !s.is_finite() {
        return Err(Error::Domain(format!("s must be finite, got {s}")));
    }
    Ok(f_prime(alpha, s))
}

#[inline]
fn f_centered(alpha: f64, s: f64) -> f64 {
    // α + (1-α)e^{-s} = 1 + (1-α)(e^{-s} - 1): the expm1/ln_1p form keeps
    // absolute precision near s = 0, where f itself is O(s²) and the
    // direct ln would drown it in the ulp of 1.
    if s >= 0.0 {
        s * (1.0 - alpha) + ((1.0 - alpha) * (-s).exp_m1()).ln_1p()
    } else {
        -s * alpha + (alpha * s.exp_m1()).ln_1p()
    }
}

#[inline]
fn f_prime(alpha: f64, s: f64) -> f64 {
    // α e^s / (1-α+α e^s) is the logistic of s + ln(α/(1-α)).
    let t = s + (alpha / (1.0 - alpha)).ln();
    let logistic = if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    };
    logistic - alpha
}

/// Tangency residual `r(s) = f(s) - (s/2) f'(s)`.
#[inline]
fn residual(alpha: f64, s: f64) -> f64 {
    f_centered(alpha, s) - 0.5 * s * f_prime(alpha, s)
}

fn fit_at(alpha: f64, s: f64, residual_abs: f64, iterations: u32) -> SubGaussFit {
    // σ² = f'(s*)/s*, projected onto the proven envelope
    // α(1-α) ≤ σ² ≤ 0.25: within rounding distance of α = 0.5 the residual
    // is flat and the raw quotient can stray a few ulps outside it.
    let sigma2 = (f_prime(alpha, s) / s).clamp(alpha * (1.0 - alpha), 0.25);
    SubGaussFit {
        alpha,
        sigma: sigma2.sqrt(),
        s_star: s,
        residual: residual_abs,
        iterations,
    }
}

/// Solve for the sub-Gaussian norm σ_Φ0(α).
///
/// `tol` is the absolute tolerance on the tangency residual
/// ([`DEFAULT_TOL`] is the conventional choice). Fails with a solver error
/// only if the bracket expansion hits [`BRACKET_CAP`], which cannot happen
/// for `α ∈ [1e-12, 0.5)`.
pub fn solve_norm(alpha: f64, tol: f64) -> Result<SubGaussFit> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }

    // Degenerate indicators: an a.s.-constant variable satisfies the
    // sub-Gaussian inequality for every σ > 0, so the infimum is 0.
    if !(TINY_ALPHA..=1.0 - TINY_ALPHA).contains(&alpha) {
        return Ok(SubGaussFit {
            alpha,
            sigma: 0.0,
            s_star: 0.0,
            residual: 0.0,
            iterations: 0,
        });
    }
    if alpha == 0.5 {
        return Ok(SubGaussFit {
            alpha,
            sigma: 0.5,
            s_star: 0.0,
            residual: 0.0,
            iterations: 0,
        });
    }
    if alpha > 0.5 {
        // f is invariant under (α, s) -> (1-α, -s), so the norm matches 1-α.
        let mut fit = solve_norm(1.0 - alpha, tol)?;
        fit.alpha = alpha;
        return Ok(fit);
    }

    // 0 < alpha < 0.5: bracket the single sign change of r on s > 0.
    // r < 0 holds near the origin (third cumulant α(1-α)(1-2α) > 0), so
    // the left endpoint needs no probing.
    let mut lo = 1e-8;
    let mut hi = 1.0;
    while residual(alpha, hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > BRACKET_CAP {
            return Err(Error::Solver(format!(
                "bracket expansion exceeded s = {BRACKET_CAP} for alpha = {alpha}"
            )));
        }
    }

    // Bisect until the interval is exhausted at f64 resolution; stopping
    // on |r| <= tol alone would accept points far from the tangency, since
    // r is O(s³)-flat near the origin.
    let mut mid = 0.5 * (lo + hi);
    let mut r_mid = residual(alpha, mid);
    let mut iterations = 0;
    while r_mid != 0.0 && hi - lo > f64::EPSILON * mid && iterations < MAX_BISECT_ITERS {
        if r_mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        r_mid = residual(alpha, mid);
        iterations += 1;
    }
    if r_mid.abs() > tol {
        return Err(Error::Solver(format!(
            "residual {r_mid} at s = {mid} exceeds tol = {tol} for alpha = {alpha}"
        )));
    }

    Ok(fit_at(alpha, mid, r_mid.abs(), iterations))
}

/// Element-wise [`solve_norm`] at the default tolerance; the data grid
/// behind the norm-vs-alpha curve.
pub fn norm_table(alphas: &[f64]) -> Result<Vec<SubGaussFit>> {
    alphas
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            solve_norm(a, DEFAULT_TOL).map_err(|e| match e {
                Error::Solver(msg) => Error::Solver(format!("alphas[{i}] = {a}: {msg}")),
                other => Error::Domain(format!("alphas[{i}] = {a}: {other}")),
            })
        })
        .collect()
}
