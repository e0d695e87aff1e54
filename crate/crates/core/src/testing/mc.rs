//! Seeded, partition-invariant Monte Carlo estimation.
//!
//! The trial index space is cut into fixed-size chunks of [`CHUNK_TRIALS`]
//! trials. Each chunk owns a ChaCha8 generator keyed from
//! `(seed, stream, chunk)` — stream 0 draws under the null, stream 1 under
//! the alternative, and confusion rows use the hypothesis index — so
//! tallies are plain integer sums and the result is bit-identical for any
//! worker count or scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::testing::{
    classify_values, lrt_statistic_values, BinaryTestConfig, ConfusionMatrix, ConfusionResult,
    ErrorRates, EstimateMode,
};

/// Trials per independently-seeded chunk.
pub const CHUNK_TRIALS: u64 = 1024;

/// ChaCha8 key for one chunk of one stream.
fn chunk_rng(seed: u64, stream: u64, chunk: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&chunk.to_le_bytes());
    key[24..32].copy_from_slice(b"htbnds01");
    ChaCha8Rng::from_seed(key)
}

/// 95% normal-approximation half-width, floored at `1.96/trials` for
/// degenerate estimates.
fn binomial_half_width(p_hat: f64, trials: u64) -> f64 {
    let t = trials as f64;
    if p_hat <= 0.0 || p_hat >= 1.0 {
        1.96 / t
    } else {
        1.96 * (p_hat * (1.0 - p_hat) / t).sqrt()
    }
}

fn chunk_bounds(chunk: u64, trials: u64) -> u64 {
    let lo = chunk * CHUNK_TRIALS;
    (trials - lo).min(CHUNK_TRIALS)
}

/// Monte Carlo estimate of the binary error rates.
///
/// `alpha` is the fraction of null-sampled trials rejected; `beta` the
/// fraction of alternative-sampled trials accepted. Deterministic in
/// `(p0, p1, cfg, trials, seed)` regardless of parallelism.
pub fn simulate_binary(
    p0: &Distribution,
    p1: &Distribution,
    cfg: &BinaryTestConfig,
    trials: u64,
    seed: u64,
) -> Result<ErrorRates> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let n = cfg.n();
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let tallies: Vec<(u64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<(u64, u64)> {
            let m = chunk_bounds(chunk, trials);
            let mut rng0 = chunk_rng(seed, 0, chunk);
            let mut rng1 = chunk_rng(seed, 1, chunk);
            let mut buf = Vec::with_capacity(n as usize);
            let mut rejects0 = 0u64;
            let mut accepts1 = 0u64;
            for _ in 0..m {
                buf.clear();
                buf.extend((0..n).map(|_| p0.draw(&mut rng0)));
                if lrt_statistic_values(&buf, p0, p1)? > cfg.c() {
                    rejects0 += 1;
                }
                buf.clear();
                buf.extend((0..n).map(|_| p1.draw(&mut rng1)));
                if lrt_statistic_values(&buf, p0, p1)? <= cfg.c() {
                    accepts1 += 1;
                }
            }
            Ok((rejects0, accepts1))
        })
        .collect::<Result<_>>()?;

    let (rejects0, accepts1) = tallies
        .iter()
        .fold((0u64, 0u64), |(a, b), &(x, y)| (a + x, b + y));
    let alpha = rejects0 as f64 / trials as f64;
    let beta = accepts1 as f64 / trials as f64;
    Ok(ErrorRates {
        alpha,
        beta,
        mode: EstimateMode::MonteCarlo,
        trials,
        half_width: binomial_half_width(alpha, trials).max(binomial_half_width(beta, trials)),
    })
}

/// Monte Carlo confusion matrix: `trials` samples per true hypothesis.
pub(super) fn mc_confusion(
    hypotheses: &[Distribution],
    n: u64,
    trials: u64,
    seed: u64,
) -> Result<ConfusionResult> {
    let m = hypotheses.len();
    if m < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 hypotheses, got {m}"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("sample size n must be at least 1".into()));
    }
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }

    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let mut probs = Vec::with_capacity(m);
    let mut tie_counts = Vec::with_capacity(m);
    for (row, truth) in hypotheses.iter().enumerate() {
        let tallies: Vec<(Vec<u64>, u64)> = (0..chunks)
            .into_par_iter()
            .map(|chunk| -> Result<(Vec<u64>, u64)> {
                let t = chunk_bounds(chunk, trials);
                let mut rng = chunk_rng(seed, row as u64, chunk);
                let mut buf = Vec::with_capacity(n as usize);
                let mut decisions = vec![0u64; m];
                let mut ties = 0u64;
                for _ in 0..t {
                    buf.clear();
                    buf.extend((0..n).map(|_| truth.draw(&mut rng)));
                    let c = classify_values(&buf, hypotheses)?;
                    decisions[c.index] += 1;
                    if c.tie {
                        ties += 1;
                    }
                }
                Ok((decisions, ties))
            })
            .collect::<Result<_>>()?;

        let mut decisions = vec![0u64; m];
        let mut ties = 0u64;
        for (d, t) in tallies {
            for (acc, v) in decisions.iter_mut().zip(d) {
                *acc += v;
            }
            ties += t;
        }
        probs.push(
            decisions
                .iter()
                .map(|&d| d as f64 / trials as f64)
                .collect::<Vec<_>>(),
        );
        tie_counts.push(ties);
    }

    let alpha_vector: Vec<f64> = (0..m).map(|i| 1.0 - probs[i][i]).collect();
    let alpha_max = alpha_vector.iter().copied().fold(0.0f64, f64::max);
    let half_width = alpha_vector
        .iter()
        .map(|&a| binomial_half_width(a, trials))
        .fold(0.0f64, f64::max);
    Ok(ConfusionResult {
        matrix: ConfusionMatrix { probs, tie_counts },
        alpha_vector,
        alpha_max,
        mode: EstimateMode::MonteCarlo,
        trials,
        half_width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{confusion_matrix, exact_binary, ConfusionMode};

    fn bern(p: f64) -> Distribution {
        Distribution::bernoulli(p).unwrap()
    }

    fn cfg(c: f64, n: u64) -> BinaryTestConfig {
        BinaryTestConfig::new(c, n).unwrap()
    }

    #[test]
    fn identical_hypotheses_give_degenerate_rates() {
        let r = simulate_binary(&bern(0.5), &bern(0.5), &cfg(0.0, 3), 2000, 1).unwrap();
        assert_eq!(r.alpha, 0.0);
        assert_eq!(r.beta, 1.0);
        assert_eq!(r.half_width, 1.96 / 2000.0);
    }

    #[test]
    fn agrees_with_exact_within_interval() {
        let exact = exact_binary(&bern(0.5), &bern(0.6), &cfg(0.0, 3)).unwrap();
        let sim = simulate_binary(&bern(0.5), &bern(0.6), &cfg(0.0, 3), 100_000, 7).unwrap();
        assert!(
            (sim.alpha - exact.alpha).abs() <= 3.0 * sim.half_width,
            "alpha {} vs {}",
            sim.alpha,
            exact.alpha
        );
        assert!(
            (sim.beta - exact.beta).abs() <= 3.0 * sim.half_width,
            "beta {} vs {}",
            sim.beta,
            exact.beta
        );
    }

    #[test]
    fn gaussian_case_matches_normal_tail() {
        // LRT for N(0,1) vs N(1,1) reduces to mean(x) > 1/2; both error
        // rates equal P(Z > sqrt(n)/2) = 0.0569 at n = 10.
        let p0 = Distribution::gaussian(0.0, 1.0).unwrap();
        let p1 = Distribution::gaussian(1.0, 1.0).unwrap();
        let r = simulate_binary(&p0, &p1, &cfg(0.0, 10), 100_000, 11).unwrap();
        let expected = 0.056_923_149_003_329_07;
        assert!(
            (r.alpha - expected).abs() <= 3.0 * r.half_width,
            "{}",
            r.alpha
        );
        assert!(
            (r.beta - expected).abs() <= 3.0 * r.half_width,
            "{}",
            r.beta
        );
        assert!((r.alpha - r.beta).abs() <= 3.0 * r.half_width);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = simulate_binary(&bern(0.3), &bern(0.7), &cfg(0.01, 5), 10_000, 42).unwrap();
        let b = simulate_binary(&bern(0.3), &bern(0.7), &cfg(0.01, 5), 10_000, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_binary(&bern(0.3), &bern(0.7), &cfg(0.01, 5), 10_000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn partition_invariant_across_thread_counts() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                (
                    simulate_binary(&bern(0.4), &bern(0.6), &cfg(0.0, 4), 30_000, 5).unwrap(),
                    mc_confusion(&[bern(0.2), bern(0.5), bern(0.8)], 3, 10_000, 5).unwrap(),
                )
            })
        };
        let (b1, c1) = run(1);
        let (b2, c2) = run(2);
        let (b8, c8) = run(8);
        assert_eq!(b1, b2);
        assert_eq!(b1, b8);
        assert_eq!(c1, c2);
        assert_eq!(c1, c8);
    }

    #[test]
    fn confusion_rows_sum_to_one() {
        let hyps = vec![bern(0.2), bern(0.5), bern(0.8)];
        let r = confusion_matrix(
            &hyps,
            5,
            ConfusionMode::MonteCarlo {
                trials: 4096,
                seed: 3,
            },
        )
        .unwrap();
        for row in &r.matrix.probs {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "row sum {sum}");
        }
        assert_eq!(r.trials, 4096);
        assert_eq!(r.mode, EstimateMode::MonteCarlo);
    }

    #[test]
    fn confusion_matches_exact_within_interval() {
        let hyps: Vec<Distribution> = (0..3)
            .map(|i| {
                let mut p = vec![0.2, 0.2, 0.2];
                p[i] = 0.6;
                Distribution::categorical(p).unwrap()
            })
            .collect();
        let exact = confusion_matrix(&hyps, 4, ConfusionMode::Exact).unwrap();
        let sim = confusion_matrix(
            &hyps,
            4,
            ConfusionMode::MonteCarlo {
                trials: 100_000,
                seed: 9,
            },
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d = (exact.matrix.probs[i][j] - sim.matrix.probs[i][j]).abs();
                assert!(
                    d <= 3.0 * sim.half_width + 3e-3,
                    "entry ({i},{j}) off by {d}"
                );
            }
        }
    }

    #[test]
    fn validation_errors() {
        assert!(simulate_binary(&bern(0.5), &bern(0.6), &cfg(0.0, 3), 0, 1).is_err());
        assert!(mc_confusion(&[bern(0.5)], 3, 100, 1).is_err());
        assert!(mc_confusion(&[bern(0.5), bern(0.6)], 0, 100, 1).is_err());
        assert!(mc_confusion(&[bern(0.5), bern(0.6)], 3, 0, 1).is_err());
    }
}
