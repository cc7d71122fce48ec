use std::fs::File;
use std::path::Path;

use twophase_core::{ParamDocument, PopulationFrame};

use crate::CliError;

const HEADER: [&str; 3] = ["y", "x", "z"];

/// Reads a population from a `y,x,z` CSV file.
pub fn load_population_csv(path: &Path) -> Result<PopulationFrame, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader.headers().map_err(|e| csv_error(path, 1, e))?.clone();
    if header.iter().ne(HEADER) {
        return Err(CliError::HeaderMismatch {
            path: path.display().to_string(),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }

    let (mut y, mut x, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_error(path, line, e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = [0.0; 3];
        for (slot, (field, name)) in row.iter_mut().zip(record.iter().zip(HEADER)) {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Csv {
                    path: path.display().to_string(),
                    line,
                    message: format!("column `{name}`: `{field}` is not a finite number"),
                })?;
        }
        y.push(row[0]);
        x.push(row[1]);
        z.push(row[2]);
    }
    Ok(PopulationFrame::new(y, x, z)?)
}

fn csv_error(path: &Path, line: u64, e: csv::Error) -> CliError {
    CliError::Csv {
        path: path.display().to_string(),
        line,
        message: e.to_string(),
    }
}

/// Reads a flat key/value parameter document.
pub fn load_params_json(path: &Path) -> Result<ParamDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
