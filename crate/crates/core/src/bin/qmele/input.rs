//! CSV ingestion and output helpers.

use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Reads one numeric column. `column` is a header name, or a 0-based index when
/// there is no header (or when it parses as an integer).
pub fn read_column(path: &Path, column: Option<&str>, no_header: bool) -> Result<Vec<f64>, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(!no_header).trim(csv::Trim::All).from_reader(file);
    let index = match column {
        None => 0,
        Some(c) => match c.parse::<usize>() {
            Ok(i) => i,
            Err(_) if no_header => {
                return Err(CliError::Usage(format!("column `{c}` given by name but --no-header is set")))
            }
            Err(_) => {
                let headers = reader.headers().map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                headers
                    .iter()
                    .position(|h| h == c)
                    .ok_or_else(|| CliError::Data(format!("{}: no column named `{c}`", path.display())))?
            }
        },
    };
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1 + usize::from(!no_header);
        let record = record.map_err(|e| CliError::Data(format!("{}: row {row}: {e}", path.display())))?;
        let cell = record
            .get(index)
            .ok_or_else(|| CliError::Data(format!("{}: row {row}: missing column {index}", path.display())))?;
        let v: f64 = cell
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| CliError::Data(format!("{}: row {row}: `{cell}` is not a finite number", path.display())))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    Ok(values)
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
