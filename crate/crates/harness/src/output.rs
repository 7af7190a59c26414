use std::path::{Path, PathBuf};

use crate::config::{OutputConfig, OutputFormat};
use crate::sweep::{ResultRow, SweepTable};
use crate::HarnessError;

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes the requested files next to `output.path` and returns their paths:
/// `<path>.csv` and `<path>_plot.csv` for CSV, `<path>.json` for JSON. The
/// JSON file holds the whole table including the configuration.
pub fn emit_results(
    table: &SweepTable,
    output: &OutputConfig,
) -> Result<Vec<PathBuf>, HarnessError> {
    if table.rows.is_empty() {
        return Err(HarnessError::EmptyTable(
            "the sweep produced no rows".into(),
        ));
    }
    if let Some(dir) = output.path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut written = Vec::new();
    for format in &output.formats {
        match format {
            OutputFormat::Csv => {
                let path = with_suffix(&output.path, ".csv");
                write_csv(&table.rows, &path)?;
                written.push(path);
                let path = with_suffix(&output.path, "_plot.csv");
                write_plot_csv(table, &path)?;
                written.push(path);
            }
            OutputFormat::Json => {
                let path = with_suffix(&output.path, ".json");
                std::fs::write(&path, serde_json::to_string_pretty(table)?)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Sweep value in the first column, mean rate of each scheme in the others.
pub fn write_plot_csv(table: &SweepTable, path: &Path) -> Result<(), HarnessError> {
    let schemes = &table.config.schemes;
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec![table.config.sweep_var_name().to_string()];
    header.extend(schemes.iter().map(|s| s.name().to_string()));
    w.write_record(&header)?;
    for value in table.config.sweep_values() {
        let mut rec = vec![value.to_string()];
        for &s in schemes {
            rec.push(
                table
                    .row(s, value)
                    .map_or(String::new(), |r| r.mean_rate_bps.to_string()),
            );
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
