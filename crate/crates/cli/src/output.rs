//! Plot-ready tables in CSV or JSON with reproducible number formatting.

use photon_shaper_core::io::format_float;
use serde_json::{Map, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::OutputFormat;
use crate::{CliError, CliResult};

pub enum Column {
    Float(Vec<f64>),
    Int(Vec<i64>),
    Text(Vec<String>),
    Bool(Vec<bool>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Column::Float(v) => v.len(),
            Column::Int(v) => v.len(),
            Column::Text(v) => v.len(),
            Column::Bool(v) => v.len(),
        }
    }

    fn cell(&self, row: usize) -> String {
        match self {
            Column::Float(v) => format_float(v[row]),
            Column::Int(v) => v[row].to_string(),
            Column::Text(v) => v[row].clone(),
            Column::Bool(v) => v[row].to_string(),
        }
    }

    fn json(&self) -> CliResult<Value> {
        Ok(match self {
            Column::Float(v) => Value::Array(
                v.iter()
                    .map(|&x| {
                        serde_json::Number::from_f64(x).map(Value::Number).ok_or_else(|| {
                            CliError::Numerical(format!("non-finite value {x} in output"))
                        })
                    })
                    .collect::<CliResult<_>>()?,
            ),
            Column::Int(v) => Value::Array(v.iter().map(|&x| Value::from(x)).collect()),
            Column::Text(v) => Value::Array(v.iter().map(|x| Value::from(x.as_str())).collect()),
            Column::Bool(v) => Value::Array(v.iter().map(|&x| Value::from(x)).collect()),
        })
    }
}

/// Write one table as `<stem>.csv` or `<stem>.json` (columnar object) under
/// `dir`. Returns the path written.
pub fn write_table(
    dir: &Path,
    stem: &str,
    format: OutputFormat,
    headers: &[&str],
    columns: &[Column],
) -> CliResult<PathBuf> {
    assert_eq!(headers.len(), columns.len());
    let rows = columns.first().map_or(0, Column::len);
    for c in columns {
        assert_eq!(c.len(), rows, "ragged table {stem}");
    }
    let path = dir.join(format!(
        "{stem}.{}",
        match format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    ));
    let mut w = BufWriter::new(File::create(&path)?);
    match format {
        OutputFormat::Csv => {
            writeln!(w, "{}", headers.join(","))?;
            for row in 0..rows {
                let cells: Vec<String> = columns.iter().map(|c| c.cell(row)).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
        }
        OutputFormat::Json => {
            let mut map = Map::new();
            for (h, c) in headers.iter().zip(columns) {
                map.insert((*h).to_string(), c.json()?);
            }
            serde_json::to_writer_pretty(&mut w, &Value::Object(map))
                .map_err(|e| CliError::Config(format!("cannot encode {stem}: {e}")))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(path)
}

/// Emitted intensity columns must be nonnegative and their quadrature sum
/// must reproduce the in-memory norm.
pub fn check_intensity(name: &str, values: &[f64], step: f64, norm_sqr: f64) -> CliResult<()> {
    for &v in values {
        if !v.is_finite() || v < 0.0 {
            return Err(CliError::Numerical(format!(
                "{name} holds a negative or non-finite sample {v}"
            )));
        }
    }
    let sum: f64 = values.iter().sum::<f64>() * step;
    let defect = (sum - norm_sqr).abs();
    if defect > 1e-9 * norm_sqr.max(1.0) {
        return Err(CliError::Numerical(format!(
            "{name} quadrature sum {sum} disagrees with the norm {norm_sqr}"
        )));
    }
    Ok(())
}
