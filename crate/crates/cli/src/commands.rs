//! One function per subcommand, each returning the rendered report.

use std::path::Path;

use serde_json::{json, Value};

use htbounds::{
    confusion_matrix, dominance_map, exact_binary, kl, mary_bounds, norm_table as solve_table,
    simulate_binary, solve_norm, subgauss_binary, subgauss_binary_symmetric, verify_binary,
    verify_mary, BinaryTestConfig, ConfusionMode, Distribution,
};

use crate::output::{json_report, sig12};
use crate::range::{parse_float_range, parse_int_range};
use crate::CliError;

fn load_spec(path: &Path) -> Result<Distribution, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    Distribution::from_json(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

/// Hypotheses from a directory of `*.json` specs, ordered by file name.
fn load_hypotheses(dir: &Path) -> Result<(Vec<Distribution>, Vec<String>), CliError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    if paths.len() < 2 {
        return Err(CliError::validation(format!(
            "{} holds {} hypothesis spec(s), need at least 2",
            dir.display(),
            paths.len()
        )));
    }
    let mut hyps = Vec::with_capacity(paths.len());
    let mut names = Vec::with_capacity(paths.len());
    for p in paths {
        hyps.push(load_spec(&p)?);
        names.push(
            p.file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned(),
        );
    }
    Ok((hyps, names))
}

fn kl_matrix_of(hyps: &[Distribution]) -> Result<Vec<Vec<f64>>, CliError> {
    let m = hyps.len();
    let mut matrix = vec![vec![0.0; m]; m];
    for j in 0..m {
        for i in 0..m {
            if i != j {
                matrix[j][i] = kl(&hyps[j], &hyps[i])?;
            }
        }
    }
    Ok(matrix)
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::validation(e.to_string()))
}

pub fn norm(alpha: f64, tol: f64) -> Result<String, CliError> {
    let fit = solve_norm(alpha, tol)?;
    json_report(
        json!({ "alpha": alpha, "tol": tol }),
        json!({ "fit": to_value(&fit)? }),
    )
}

pub fn norm_table(alphas_spec: &str, format: &str) -> Result<String, CliError> {
    let alphas = parse_float_range(alphas_spec)?;
    let fits = solve_table(&alphas)?;
    match format {
        "csv" => {
            let mut out = String::from("alpha,sigma,s_star\n");
            for fit in &fits {
                out.push_str(&format!(
                    "{},{},{}\n",
                    sig12(fit.alpha),
                    sig12(fit.sigma),
                    sig12(fit.s_star)
                ));
            }
            Ok(out)
        }
        "json" => json_report(
            json!({ "alphas": alphas_spec, "format": format }),
            json!({ "rows": to_value(&fits)? }),
        ),
        other => Err(CliError::validation(format!(
            "unknown format '{other}', expected csv or json"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn bound_binary(
    alpha: f64,
    n: u64,
    kl_flag: Option<f64>,
    kl01_flag: Option<f64>,
    p0: Option<&Path>,
    p1: Option<&Path>,
    resolution: f64,
) -> Result<String, CliError> {
    let (kl_10, kl_01, spec_config) = match (kl_flag, p0, p1) {
        (Some(d), None, None) => (d, kl01_flag, Value::Null),
        (None, Some(p0_path), Some(p1_path)) => {
            let d0 = load_spec(p0_path)?;
            let d1 = load_spec(p1_path)?;
            (
                kl(&d1, &d0)?,
                Some(kl(&d0, &d1)?),
                json!({
                    "p0": p0_path.display().to_string(),
                    "p1": p1_path.display().to_string(),
                    "p0_spec": to_value(&d0)?,
                    "p1_spec": to_value(&d1)?,
                }),
            )
        }
        _ => {
            return Err(CliError::validation(
                "provide either --kl or both --p0 and --p1",
            ))
        }
    };
    let mut report = subgauss_binary(alpha, n, kl_10)?;
    report.kl_01 = kl_01;
    let beta_floor_implicit = kl_01
        .map(|d| subgauss_binary_symmetric(alpha, n, d, resolution))
        .transpose()?;
    json_report(
        json!({
            "alpha": alpha,
            "n": n,
            "kl": kl_flag,
            "kl01": kl_01,
            "resolution": resolution,
            "specs": spec_config,
        }),
        json!({
            "report": to_value(&report)?,
            "beta_floor_implicit": beta_floor_implicit,
        }),
    )
}

pub fn bound_mary(
    n: u64,
    kl_matrix_path: Option<&Path>,
    m: Option<usize>,
    delta: Option<f64>,
    hypotheses: Option<&Path>,
    alphas_csv: Option<&str>,
) -> Result<String, CliError> {
    let (matrix, source) = match (kl_matrix_path, m, delta, hypotheses) {
        (Some(path), None, None, None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::validation(format!("cannot read {}: {e}", path.display()))
            })?;
            let matrix: Vec<Vec<f64>> = serde_json::from_str(&text)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
            (matrix, json!({ "kl_matrix": path.display().to_string() }))
        }
        (None, Some(m), Some(delta), None) => {
            let matrix = (0..m)
                .map(|j| (0..m).map(|i| if i == j { 0.0 } else { delta }).collect())
                .collect();
            (matrix, json!({ "m": m, "delta": delta }))
        }
        (None, None, None, Some(dir)) => {
            let (hyps, names) = load_hypotheses(dir)?;
            (
                kl_matrix_of(&hyps)?,
                json!({ "hypotheses": dir.display().to_string(), "files": names }),
            )
        }
        _ => {
            return Err(CliError::validation(
                "provide exactly one of --kl-matrix, --m with --delta, or --hypotheses",
            ))
        }
    };
    let alphas: Option<Vec<f64>> = alphas_csv
        .map(|s| {
            s.split(',')
                .map(|p| {
                    p.trim().parse::<f64>().map_err(|_| {
                        CliError::validation(format!("'{p}' in --alphas is not a number"))
                    })
                })
                .collect()
        })
        .transpose()?;
    let report = mary_bounds(&matrix, n, alphas.as_deref())?;
    json_report(
        json!({ "n": n, "alphas": alphas, "source": source }),
        json!({ "report": to_value(&report)? }),
    )
}

/// Shared tail of `exact` and `simulate`: bound report at the measured
/// alpha plus the validity record.
fn binary_run_report(
    rates: &htbounds::ErrorRates,
    p0: &Distribution,
    p1: &Distribution,
    n: u64,
    config: Value,
) -> Result<String, CliError> {
    let kl_10 = kl(p1, p0)?;
    let mut report = subgauss_binary(rates.alpha, n, kl_10)?;
    report.kl_01 = Some(kl(p0, p1)?);
    let validity = verify_binary(rates, &report);
    json_report(
        config,
        json!({
            "rates": to_value(rates)?,
            "bounds": to_value(&report)?,
            "validity": to_value(&validity)?,
        }),
    )
}

pub fn exact(p0_path: &Path, p1_path: &Path, n: u64, c: f64) -> Result<String, CliError> {
    let p0 = load_spec(p0_path)?;
    let p1 = load_spec(p1_path)?;
    let cfg = BinaryTestConfig::new(c, n)?;
    let rates = exact_binary(&p0, &p1, &cfg)?;
    let config = json!({
        "mode": "exact",
        "p0": p0_path.display().to_string(),
        "p1": p1_path.display().to_string(),
        "p0_spec": to_value(&p0)?,
        "p1_spec": to_value(&p1)?,
        "n": n,
        "c": c,
        "c_prime": cfg.c_prime(),
    });
    binary_run_report(&rates, &p0, &p1, n, config)
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    p0_path: &Path,
    p1_path: &Path,
    n: u64,
    c: f64,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<String, CliError> {
    let p0 = load_spec(p0_path)?;
    let p1 = load_spec(p1_path)?;
    let cfg = BinaryTestConfig::new(c, n)?;
    let rates = simulate_binary(&p0, &p1, &cfg, trials, seed)?;
    let config = json!({
        "mode": "monte-carlo",
        "p0": p0_path.display().to_string(),
        "p1": p1_path.display().to_string(),
        "p0_spec": to_value(&p0)?,
        "p1_spec": to_value(&p1)?,
        "n": n,
        "c": c,
        "c_prime": cfg.c_prime(),
        "trials": trials,
        "seed": seed,
        "jobs": jobs,
    });
    binary_run_report(&rates, &p0, &p1, n, config)
}

pub fn mary(
    dir: &Path,
    n: u64,
    exact_mode: bool,
    trials: Option<u64>,
    seed: u64,
    jobs: usize,
) -> Result<String, CliError> {
    let (hyps, names) = load_hypotheses(dir)?;
    let mode = if exact_mode {
        ConfusionMode::Exact
    } else {
        let trials = trials
            .ok_or_else(|| CliError::validation("--trials is required unless --exact is set"))?;
        ConfusionMode::MonteCarlo { trials, seed }
    };
    let result = confusion_matrix(&hyps, n, mode)?;
    let matrix = kl_matrix_of(&hyps)?;
    let relaxed = mary_bounds(&matrix, n, None)?;
    let aposteriori = mary_bounds(&matrix, n, Some(&result.alpha_vector))?;
    let validity = verify_mary(&result, &relaxed, Some(&aposteriori))?;
    json_report(
        json!({
            "hypotheses": dir.display().to_string(),
            "files": names,
            "specs": to_value(&hyps)?,
            "n": n,
            "mode": if exact_mode { "exact" } else { "monte-carlo" },
            "trials": trials,
            "seed": seed,
            "jobs": jobs,
        }),
        json!({
            "confusion": to_value(&result)?,
            "bounds": { "relaxed": to_value(&relaxed)?, "aposteriori": to_value(&aposteriori)? },
            "validity": to_value(&validity)?,
        }),
    )
}

pub fn compare(delta: f64, m_range: &str, n_range: &str, format: &str) -> Result<String, CliError> {
    let m_values: Vec<usize> = parse_int_range(m_range)?
        .into_iter()
        .map(|v| v as usize)
        .collect();
    let n_values = parse_int_range(n_range)?;
    let rows = dominance_map(&m_values, &n_values, delta)?;
    match format {
        "csv" => {
            let mut out = String::from("m,n,uniform_delta,fano,winner\n");
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.m,
                    row.n,
                    sig12(row.uniform_delta),
                    sig12(row.fano),
                    row.winner
                ));
            }
            Ok(out)
        }
        "json" => json_report(
            json!({ "delta": delta, "m_range": m_range, "n_range": n_range }),
            json!({ "rows": to_value(&rows)? }),
        ),
        other => Err(CliError::validation(format!(
            "unknown format '{other}', expected csv or json"
        ))),
    }
}
