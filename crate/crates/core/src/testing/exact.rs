//! Exact error rates by enumeration of multinomial count vectors.
//!
//! A length-`n` sample from a `K`-symbol alphabet enters every likelihood
//! computation only through its histogram, so summing multinomial
//! probabilities over the `C(n+K-1, K-1)` count vectors gives exact rates
//! at a fraction of the `K^n` raw-outcome cost.

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::testing::{
    BinaryTestConfig, ConfusionMatrix, ConfusionResult, ErrorRates, EstimateMode,
};

/// Enumeration refuses to visit more count vectors than this.
pub const MAX_EXACT_STATES: u64 = 2_000_000;

/// Probability vectors of a compatible discrete pair.
fn discrete_pair(p0: &Distribution, p1: &Distribution) -> Result<(Vec<f64>, Vec<f64>)> {
    let q0 = p0.probs().ok_or_else(|| {
        Error::UnsupportedExact("gaussian hypotheses have no finite alphabet".into())
    })?;
    let q1 = p1.probs().ok_or_else(|| {
        Error::UnsupportedExact("gaussian hypotheses have no finite alphabet".into())
    })?;
    if q0.len() != q1.len() {
        return Err(Error::FamilyMismatch(format!(
            "alphabet sizes differ: {} vs {}",
            q0.len(),
            q1.len()
        )));
    }
    Ok((q0, q1))
}

/// `C(n+k-1, k-1)` with overflow saturation.
fn state_count(n: u64, k: usize) -> u64 {
    let mut c: u128 = 1;
    for i in 1..k as u128 {
        c = c.saturating_mul(n as u128 + i) / i;
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

fn check_state_cap(n: u64, k: usize) -> Result<()> {
    let states = state_count(n, k);
    if states > MAX_EXACT_STATES {
        return Err(Error::TooLarge(format!(
            "{states} count vectors for n = {n}, K = {k} exceeds the cap of {MAX_EXACT_STATES}"
        )));
    }
    Ok(())
}

/// `ln(i!)` for `i = 0..=n`.
fn ln_factorial_table(n: u64) -> Vec<f64> {
    let mut table = Vec::with_capacity(n as usize + 1);
    table.push(0.0);
    let mut acc = 0.0;
    for i in 1..=n {
        acc += (i as f64).ln();
        table.push(acc);
    }
    table
}

/// Visit every vector of `k` nonnegative counts summing to `n`.
fn for_each_composition(n: u64, k: usize, f: &mut dyn FnMut(&[u64])) {
    fn rec(counts: &mut [u64], idx: usize, remaining: u64, f: &mut dyn FnMut(&[u64])) {
        if idx + 1 == counts.len() {
            counts[idx] = remaining;
            f(counts);
            return;
        }
        for v in 0..=remaining {
            counts[idx] = v;
            rec(counts, idx + 1, remaining - v, f);
        }
    }
    let mut counts = vec![0u64; k];
    rec(&mut counts, 0, n, f);
}

/// Multinomial log-probability of `counts` under `ln_probs`, `None` when a
/// zero-mass symbol is hit.
fn multinomial_log_prob(counts: &[u64], ln_probs: &[f64], lf: &[f64], n: u64) -> Option<f64> {
    let mut acc = lf[n as usize];
    for (&c, &lp) in counts.iter().zip(ln_probs) {
        if c == 0 {
            continue;
        }
        if lp == f64::NEG_INFINITY {
            return None;
        }
        acc += c as f64 * lp - lf[c as usize];
    }
    Some(acc)
}

/// Per-count-vector KL-difference statistic; `None` when the state is
/// impossible under both hypotheses.
fn statistic_from_counts(counts: &[u64], ln_p0: &[f64], ln_p1: &[f64], n: u64) -> Option<f64> {
    let mut finite = 0.0;
    let mut pos_inf = false;
    let mut neg_inf = false;
    for (k, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        match (ln_p0[k] == f64::NEG_INFINITY, ln_p1[k] == f64::NEG_INFINITY) {
            (true, true) => return None,
            (true, false) => pos_inf = true,
            (false, true) => neg_inf = true,
            (false, false) => finite += c as f64 * (ln_p1[k] - ln_p0[k]),
        }
    }
    match (pos_inf, neg_inf) {
        (true, true) => None, // zero probability under both product laws
        (true, false) => Some(f64::INFINITY),
        (false, true) => Some(f64::NEG_INFINITY),
        (false, false) => Some(finite / n as f64),
    }
}

/// Exact type I / type II error rates of the binary test over a finite
/// alphabet.
///
/// `β` is accumulated as `1 - E_{P_1}Φ` over the rejection region, so the
/// degenerate `P_0 = P_1` instance comes out exactly `(0, 1)`.
pub fn exact_binary(
    p0: &Distribution,
    p1: &Distribution,
    cfg: &BinaryTestConfig,
) -> Result<ErrorRates> {
    let (q0, q1) = discrete_pair(p0, p1)?;
    let n = cfg.n();
    let k = q0.len();
    check_state_cap(n, k)?;

    let lf = ln_factorial_table(n);
    let ln_p0: Vec<f64> = q0.iter().map(|p| p.ln()).collect();
    let ln_p1: Vec<f64> = q1.iter().map(|p| p.ln()).collect();

    let mut alpha = 0.0;
    let mut expect1 = 0.0; // E_{P_1} Φ
    for_each_composition(n, k, &mut |counts| {
        let Some(stat) = statistic_from_counts(counts, &ln_p0, &ln_p1, n) else {
            return;
        };
        if stat > cfg.c() {
            if let Some(lp) = multinomial_log_prob(counts, &ln_p0, &lf, n) {
                alpha += lp.exp();
            }
            if let Some(lp) = multinomial_log_prob(counts, &ln_p1, &lf, n) {
                expect1 += lp.exp();
            }
        }
    });

    Ok(ErrorRates {
        alpha,
        beta: 1.0 - expect1,
        mode: EstimateMode::Exact,
        trials: 0,
        half_width: 0.0,
    })
}

/// Exact confusion matrix of the M-ary maximum-likelihood classifier.
pub(super) fn exact_confusion(hypotheses: &[Distribution], n: u64) -> Result<ConfusionResult> {
    let m = hypotheses.len();
    if m < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 hypotheses, got {m}"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("sample size n must be at least 1".into()));
    }
    let mut prob_vecs = Vec::with_capacity(m);
    for h in hypotheses {
        prob_vecs.push(h.probs().ok_or_else(|| {
            Error::UnsupportedExact("gaussian hypotheses have no finite alphabet".into())
        })?);
    }
    let k = prob_vecs[0].len();
    if prob_vecs.iter().any(|p| p.len() != k) {
        return Err(Error::FamilyMismatch(
            "hypotheses must share one alphabet".into(),
        ));
    }
    check_state_cap(n, k)?;

    let lf = ln_factorial_table(n);
    let ln_probs: Vec<Vec<f64>> = prob_vecs
        .iter()
        .map(|p| p.iter().map(|q| q.ln()).collect())
        .collect();

    let mut probs = vec![vec![0.0f64; m]; m];
    let mut tie_states = 0u64;
    for_each_composition(n, k, &mut |counts| {
        // Log-likelihood of the histogram under each hypothesis; -inf when
        // a zero-mass symbol was observed.
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0usize;
        let mut tie = false;
        for (i, lp) in ln_probs.iter().enumerate() {
            let mut loglik = 0.0;
            for (s, &c) in counts.iter().enumerate() {
                if c > 0 {
                    loglik += c as f64 * lp[s];
                }
            }
            if loglik > best {
                best = loglik;
                arg = i;
                tie = false;
            } else if loglik == best && best > f64::NEG_INFINITY {
                tie = true;
            }
        }
        if best == f64::NEG_INFINITY {
            // Counts only on symbols no hypothesis can emit: zero
            // probability under every row, nothing to tally.
            return;
        }
        if tie {
            tie_states += 1;
        }
        for (i, row) in probs.iter_mut().enumerate() {
            if let Some(lp) = multinomial_log_prob(counts, &ln_probs[i], &lf, n) {
                row[arg] += lp.exp();
            }
        }
    });

    let alpha_vector: Vec<f64> = (0..m)
        .map(|i| (1.0 - probs[i][i]).clamp(0.0, 1.0))
        .collect();
    let alpha_max = alpha_vector.iter().copied().fold(0.0f64, f64::max);
    Ok(ConfusionResult {
        matrix: ConfusionMatrix {
            probs,
            tie_counts: vec![tie_states; m],
        },
        alpha_vector,
        alpha_max,
        mode: EstimateMode::Exact,
        trials: 0,
        half_width: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Distribution;
    use crate::testing::{confusion_matrix, ConfusionMode};

    fn bern(p: f64) -> Distribution {
        Distribution::bernoulli(p).unwrap()
    }

    fn cfg(c: f64, n: u64) -> BinaryTestConfig {
        BinaryTestConfig::new(c, n).unwrap()
    }

    #[test]
    fn state_count_matches_binomials() {
        assert_eq!(state_count(3, 2), 4);
        assert_eq!(state_count(5, 3), 21);
        assert_eq!(state_count(50, 2), 51);
        assert_eq!(state_count(10, 6), 3003);
    }

    #[test]
    fn composition_enumeration_is_complete() {
        let mut seen = Vec::new();
        for_each_composition(3, 3, &mut |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 10);
        assert!(seen.iter().all(|c| c.iter().sum::<u64>() == 3));
        let mut unique = seen.clone();
        unique.sort();
        unique.dedup();
        assert_eq!(unique.len(), 10);
    }

    #[test]
    fn binomial_tail_instance() {
        // Reject iff #ones >= 2: alpha = P(Bin(3, 0.5) >= 2) = 0.5,
        // beta = P(Bin(3, 0.6) <= 1) = 0.352.
        let r = exact_binary(&bern(0.5), &bern(0.6), &cfg(0.0, 3)).unwrap();
        assert!((r.alpha - 0.5).abs() < 1e-12, "{}", r.alpha);
        assert!((r.beta - 0.352).abs() < 1e-12, "{}", r.beta);
        assert_eq!(r.mode, EstimateMode::Exact);
        assert_eq!(r.trials, 0);
        assert_eq!(r.half_width, 0.0);
    }

    #[test]
    fn identical_hypotheses_never_reject() {
        let r = exact_binary(&bern(0.5), &bern(0.5), &cfg(0.0, 3)).unwrap();
        assert_eq!(r.alpha, 0.0);
        assert_eq!(r.beta, 1.0);
    }

    #[test]
    fn threshold_above_statistic_range() {
        // Max statistic is ln 1.2 ≈ 0.182 < 1.
        let r = exact_binary(&bern(0.5), &bern(0.6), &cfg(1.0, 3)).unwrap();
        assert_eq!(r.alpha, 0.0);
        assert_eq!(r.beta, 1.0);
    }

    #[test]
    fn gaussian_is_unsupported() {
        let g = Distribution::gaussian(0.0, 1.0).unwrap();
        assert!(matches!(
            exact_binary(&g, &bern(0.5), &cfg(0.0, 2)),
            Err(Error::UnsupportedExact(_))
        ));
    }

    #[test]
    fn state_cap_is_enforced() {
        let p: Vec<f64> = vec![1.0 / 30.0; 30];
        let d = Distribution::categorical(p).unwrap();
        assert!(matches!(
            exact_binary(&d, &d, &cfg(0.0, 30)),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn alphabet_mismatch_rejected() {
        let d3 = Distribution::categorical(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(
            exact_binary(&bern(0.5), &d3, &cfg(0.0, 2)),
            Err(Error::FamilyMismatch(_))
        ));
    }

    /// Brute-force oracle: enumerate all K^n raw sequences.
    fn brute_force_binary(p0: &Distribution, p1: &Distribution, c: f64, n: u64) -> (f64, f64) {
        let q0 = p0.probs().unwrap();
        let q1 = p1.probs().unwrap();
        let k = q0.len();
        let total = (k as u64).pow(n as u32);
        let mut alpha = 0.0;
        let mut expect1 = 0.0;
        for code in 0..total {
            let mut digits = Vec::with_capacity(n as usize);
            let mut rest = code;
            for _ in 0..n {
                digits.push((rest % k as u64) as usize);
                rest /= k as u64;
            }
            let prob0: f64 = digits.iter().map(|&d| q0[d]).product();
            let prob1: f64 = digits.iter().map(|&d| q1[d]).product();
            if prob0 == 0.0 && prob1 == 0.0 {
                continue;
            }
            let stat = if prob0 == 0.0 {
                f64::INFINITY
            } else if prob1 == 0.0 {
                f64::NEG_INFINITY
            } else {
                (prob1.ln() - prob0.ln()) / n as f64
            };
            if stat > c {
                alpha += prob0;
                expect1 += prob1;
            }
        }
        (alpha, 1.0 - expect1)
    }

    #[test]
    fn matches_raw_sequence_enumeration() {
        // Log-ratio combinations must not be able to land exactly on a
        // threshold (e.g. mirrored probability vectors, whose ratios cancel
        // pairwise): there the two enumeration routes legitimately round
        // the boundary differently.
        let cases: Vec<(Distribution, Distribution)> = vec![
            (bern(0.5), bern(0.6)),
            (bern(0.2), bern(0.7)),
            (
                Distribution::categorical(vec![0.5, 0.3, 0.2]).unwrap(),
                Distribution::categorical(vec![0.25, 0.3, 0.45]).unwrap(),
            ),
            (
                Distribution::categorical(vec![0.5, 0.5, 0.0]).unwrap(),
                Distribution::categorical(vec![0.3, 0.3, 0.4]).unwrap(),
            ),
        ];
        for (p0, p1) in cases {
            for c in [0.0, 0.05, 0.3] {
                for n in [1u64, 2, 5] {
                    let fast = exact_binary(&p0, &p1, &cfg(c, n)).unwrap();
                    let (alpha, beta) = brute_force_binary(&p0, &p1, c, n);
                    assert!(
                        (fast.alpha - alpha).abs() < 1e-12,
                        "alpha mismatch {p0:?} {p1:?} c {c} n {n}: {} vs {alpha}",
                        fast.alpha
                    );
                    assert!(
                        (fast.beta - beta).abs() < 1e-12,
                        "beta mismatch {p0:?} {p1:?} c {c} n {n}: {} vs {beta}",
                        fast.beta
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_monotone_in_threshold() {
        let mut last_alpha = f64::INFINITY;
        let mut last_beta = -f64::INFINITY;
        for c in [0.0, 0.01, 0.05, 0.1, 0.2] {
            let r = exact_binary(&bern(0.4), &bern(0.7), &cfg(c, 8)).unwrap();
            assert!(r.alpha <= last_alpha + 1e-15);
            assert!(r.beta >= last_beta - 1e-15);
            last_alpha = r.alpha;
            last_beta = r.beta;
        }
    }

    #[test]
    fn confusion_rows_sum_to_one() {
        let hyps: Vec<Distribution> = (0..3)
            .map(|i| {
                let mut p = vec![0.2, 0.2, 0.2];
                p[i] = 0.6;
                Distribution::categorical(p).unwrap()
            })
            .collect();
        let r = confusion_matrix(&hyps, 4, ConfusionMode::Exact).unwrap();
        for row in &r.matrix.probs {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "row sum {sum}");
        }
        // Peaked hypotheses are identified more often than not.
        for i in 0..3 {
            assert!(r.matrix.probs[i][i] > 0.5);
        }
        assert_eq!(
            r.alpha_max,
            r.alpha_vector.iter().cloned().fold(0.0, f64::max)
        );
    }

    #[test]
    fn confusion_identical_hypotheses_exposes_tie_rule() {
        let hyps = vec![bern(0.5), bern(0.5), bern(0.5)];
        let r = confusion_matrix(&hyps, 3, ConfusionMode::Exact).unwrap();
        for i in 0..3 {
            assert!((r.matrix.probs[i][0] - 1.0).abs() < 1e-12);
            for j in 1..3 {
                assert_eq!(r.matrix.probs[i][j], 0.0);
            }
        }
        assert!(r.alpha_vector[0] < 1e-12);
        assert_eq!(r.alpha_vector[1], 1.0);
        assert_eq!(r.alpha_max, 1.0);
        assert_eq!(r.matrix.tie_counts, vec![4, 4, 4]); // every state ties
    }

    #[test]
    fn confusion_m2_matches_binary_rates() {
        // At c = 0 the two-hypothesis classifier is the binary test with
        // ties accepting the null.
        let r2 = confusion_matrix(&[bern(0.5), bern(0.6)], 3, ConfusionMode::Exact).unwrap();
        let rb = exact_binary(&bern(0.5), &bern(0.6), &cfg(0.0, 3)).unwrap();
        assert!((r2.matrix.probs[0][1] - rb.alpha).abs() < 1e-12);
        assert!((r2.matrix.probs[1][0] - rb.beta).abs() < 1e-12);
    }

    #[test]
    fn confusion_rejects_bad_inputs() {
        let g = Distribution::gaussian(0.0, 1.0).unwrap();
        assert!(confusion_matrix(&[g.clone(), g], 2, ConfusionMode::Exact).is_err());
        assert!(confusion_matrix(&[bern(0.5)], 2, ConfusionMode::Exact).is_err());
        let d3 = Distribution::categorical(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(confusion_matrix(&[bern(0.5), d3], 2, ConfusionMode::Exact).is_err());
    }
}
