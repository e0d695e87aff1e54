//! Report rendering: pretty JSON with embedded config, CSV with 12
//! significant digits and '.' decimals.

use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// 12 significant digits, locale-independent.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn json_report(config: Value, body: Value) -> Result<String, CliError> {
    let mut report = serde_json::Map::new();
    report.insert("config".to_string(), config);
    if let Value::Object(map) = body {
        for (k, v) in map {
            report.insert(k, v);
        }
    } else {
        report.insert("result".to_string(), body);
    }
    serde_json::to_string_pretty(&Value::Object(report))
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::validation(e.to_string()))
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(CliError::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
