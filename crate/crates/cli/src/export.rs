use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use equiosc::{eval_weighted, interval_maxima, ExtReal, NodeSystem, Problem, Result};
use serde_json::json;

use crate::format::{exts, fmt9, nums};

/// Writes `F(y, t)` at `samples` equally spaced points as CSV with header `t,F`
/// (`-inf` as an empty field), plus a JSON sidecar with nodes, maxima and argmax
/// points. Returns the sidecar path.
pub fn export_curve(problem: &Problem, y: &NodeSystem, samples: usize, path: &Path) -> Result<PathBuf> {
    if samples < 2 {
        return Err(equiosc::Error::Validation("a curve needs at least 2 samples".into()));
    }
    let mut csv = String::from("t,F\n");
    for k in 0..samples {
        let t = if k + 1 == samples { 1.0 } else { k as f64 / (samples - 1) as f64 };
        let value = match eval_weighted(problem, y, t)? {
            ExtReal::NegInf => String::new(),
            ExtReal::Finite(v) => fmt9(v),
        };
        writeln!(csv, "{},{}", fmt9(t), value).expect("writing to a String");
    }
    std::fs::write(path, csv)?;

    let maxima = interval_maxima(problem, y)?;
    let argmax: Vec<serde_json::Value> =
        maxima.argmax.iter().map(|t| t.map_or(serde_json::Value::Null, crate::format::num)).collect();
    let sidecar = json!({
        "nodes": nums(y.as_slice()),
        "m": exts(&maxima.m),
        "argmax": argmax,
    });
    let sidecar_path = path.with_extension("json");
    std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(sidecar_path)
}
