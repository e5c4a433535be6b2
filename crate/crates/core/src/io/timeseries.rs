use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{MhdError, Result};
use crate::experiments::SweepResult;

/// CSV with one row per record; `{:.16e}` keeps 17 significant digits, so
/// parsing gives back the exact values.
pub fn timeseries_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = DiagnosticsRecord::COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let row: Vec<String> = r.values().iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_timeseries(text: &str) -> Result<Vec<DiagnosticsRecord>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| MhdError::Format("empty time series".into()))?;
    if header.split(',').ne(DiagnosticsRecord::COLUMNS.iter().copied()) {
        return Err(MhdError::Format(format!("unexpected header `{header}`")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| MhdError::Format(format!("row {}: {e}", i + 1)))?;
            let arr: [f64; 25] = vals
                .try_into()
                .map_err(|v: Vec<f64>| MhdError::Format(format!("row {}: {} columns", i + 1, v.len())))?;
            Ok(DiagnosticsRecord::from_values(&arr))
        })
        .collect()
}

pub fn write_timeseries(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    fs::write(path, timeseries_csv(records))?;
    Ok(())
}

pub fn read_timeseries(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    parse_timeseries(&fs::read_to_string(path)?)
}

/// One row per case: `label,error,growth,blew_up,wall_time_s`.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("label,error,growth,blew_up,wall_time_s\n");
    for c in &result.cases {
        let growth = c.growth.map(|g| format!("{g:.16e}")).unwrap_or_default();
        out.push_str(&format!(
            "{:.16e},{:.16e},{},{},{:.6}\n",
            c.label, c.error, growth, c.blew_up, c.wall_time_s
        ));
    }
    out
}

pub fn write_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    fs::write(path, sweep_csv(result))?;
    Ok(())
}

/// Pretty-printed JSON summary.
pub fn write_json(value: &impl Serialize, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| MhdError::Format(e.to_string()))?;
    f.write_all(b"\n")?;
    Ok(())
}
