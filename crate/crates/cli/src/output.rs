//! Shared file writers/readers: CSV for curves and matrices, JSON for
//! scalar summaries.

use std::path::Path;

use privgp_core::linalg::SymMatrix;
use privgp_core::{Error, Result};

/// Write a table: one header row, then rows of floats.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(header)?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writer.write_record(&cells)?;
    }
    writer.flush()?;
    Ok(())
}

/// Write a symmetric matrix with generated column names `c1..cn`.
pub fn write_matrix_csv(path: &Path, matrix: &SymMatrix) -> Result<()> {
    let n = matrix.order();
    let header: Vec<String> = (1..=n).map(|j| format!("c{j}")).collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = matrix.to_rows();
    write_table_csv(path, &header_refs, &rows)
}

/// Pretty-printed JSON document.
pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Read query points from a CSV with columns `x_1..x_d` (a trailing `y`
/// column, if present, is ignored so dataset files work too).
pub fn read_points_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let mut d = headers.len();
    if headers.iter().next_back() == Some("y") {
        d -= 1;
    }
    if d == 0 {
        return Err(Error::InvalidInput(
            "points CSV needs at least one x_ column".into(),
        ));
    }
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record?;
        let mut p = Vec::with_capacity(d);
        for k in 0..d {
            let cell = record.get(k).unwrap_or("");
            p.push(
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("cannot parse '{cell}' as a number"))
                })?,
            );
        }
        points.push(p);
    }
    Ok(points)
}
