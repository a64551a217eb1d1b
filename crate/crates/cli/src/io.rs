//! CSV dialect: comma separated, header row required, `NA` marks a missing
//! response, numbers written with the shortest round-trip representation.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{CliError, Result};

pub const NA: &str = "NA";

/// A numeric table read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable {
    pub header: Vec<String>,
    /// Row-major cells; `None` for `NA`.
    pub cells: Vec<Vec<Option<f64>>>,
}

impl NumericTable {
    pub fn nrows(&self) -> usize {
        self.cells.len()
    }

    pub fn ncols(&self) -> usize {
        self.header.len()
    }
}

pub fn read_table(path: &Path) -> Result<NumericTable> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let parse_err = |line: u64, column: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(1, 0, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            message: "empty file; a header row is required".into(),
        });
    }
    if header.iter().all(|h| h.parse::<f64>().is_ok()) {
        return Err(parse_err(1, 1, "header row required, found numbers".into()));
    }

    let mut cells = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, 0, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                record.len().min(header.len()) + 1,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                if field == NA {
                    return Ok(None);
                }
                match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(Some(v)),
                    _ => Err(parse_err(line, c + 1, format!("not a finite number: {field:?}"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        cells.push(row);
    }
    if cells.is_empty() {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            message: "no data rows".into(),
        });
    }
    Ok(NumericTable { header, cells })
}

/// A fully observed matrix with its column names.
pub fn read_matrix(path: &Path) -> Result<(Vec<String>, DMatrix<f64>)> {
    let table = read_table(path)?;
    let (n, p) = (table.nrows(), table.ncols());
    let mut m = DMatrix::zeros(n, p);
    for (i, row) in table.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            m[(i, j)] = cell.ok_or_else(|| CliError::Parse {
                path: path.to_path_buf(),
                line: i as u64 + 2,
                column: j + 1,
                message: "NA is only allowed in the response".into(),
            })?;
        }
    }
    Ok((table.header, m))
}

/// A single-column response; `NA` entries become missing.
pub fn read_response(path: &Path) -> Result<(String, Vec<f64>, Vec<bool>)> {
    let table = read_table(path)?;
    if table.ncols() != 1 {
        return Err(CliError::Dimension(format!(
            "{}: response must have one column, found {}",
            path.display(),
            table.ncols()
        )));
    }
    let missing: Vec<bool> = table.cells.iter().map(|r| r[0].is_none()).collect();
    let y = table.cells.iter().map(|r| r[0].unwrap_or(f64::NAN)).collect();
    Ok((table.header[0].clone(), y, missing))
}

/// Writes `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        write(&mut w).map_err(|e| CliError::io(path, e))?;
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn write_matrix(path: &Path, header: &[String], m: &DMatrix<f64>) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "{}", header.join(","))?;
        for i in 0..m.nrows() {
            let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    })
}

pub fn write_response(path: &Path, name: &str, y: &[f64], missing: &[bool]) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "{name}")?;
        for (v, &m) in y.iter().zip(missing) {
            if m {
                writeln!(w, "{NA}")?;
            } else {
                writeln!(w, "{v}")?;
            }
        }
        Ok(())
    })
}
