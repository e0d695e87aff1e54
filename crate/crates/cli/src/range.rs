//! `start:stop:step` grid parsing, inclusive of on-grid endpoints.

use crate::CliError;

pub fn parse_float_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::validation(format!(
            "range '{spec}' must be start:stop:step"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>().map_err(|_| {
                CliError::validation(format!("'{p}' in range '{spec}' is not a number"))
            })
        })
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !step.is_finite() || step <= 0.0 {
        return Err(CliError::validation(format!(
            "range step must be positive, got {step}"
        )));
    }
    let mut values = Vec::new();
    let mut k = 0u64;
    loop {
        let v = start + k as f64 * step;
        if v > stop + step * 1e-9 {
            break;
        }
        values.push(v);
        k += 1;
    }
    if values.is_empty() {
        return Err(CliError::validation(format!("range '{spec}' is empty")));
    }
    Ok(values)
}

pub fn parse_int_range(spec: &str) -> Result<Vec<u64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 && parts.len() != 3 {
        return Err(CliError::validation(format!(
            "range '{spec}' must be start:stop or start:stop:step"
        )));
    }
    let nums: Vec<u64> = parts
        .iter()
        .map(|p| {
            p.parse::<u64>().map_err(|_| {
                CliError::validation(format!(
                    "'{p}' in range '{spec}' is not a nonnegative integer"
                ))
            })
        })
        .collect::<Result<_, _>>()?;
    let (start, stop) = (nums[0], nums[1]);
    let step = if parts.len() == 3 { nums[2] } else { 1 };
    if step == 0 {
        return Err(CliError::validation(
            "range step must be positive".to_string(),
        ));
    }
    let values: Vec<u64> = (start..=stop).step_by(step as usize).collect();
    if values.is_empty() {
        return Err(CliError::validation(format!("range '{spec}' is empty")));
    }
    Ok(values)
}
