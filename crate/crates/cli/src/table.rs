use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// Named numeric columns of equal length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn push(&mut self, name: &str, values: Vec<f64>) {
        self.headers.push(name.to_string());
        self.columns.push(values);
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }

    /// Requires every named column, reporting all the missing ones at once.
    pub fn require(&self, names: &[&str]) -> Result<(), CliError> {
        let missing: Vec<&str> = names.iter().copied().filter(|n| self.column(n).is_none()).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(format!("missing columns: {}", missing.join(", "))))
        }
    }

    /// Column name and 1-based data row of the first NaN or infinity.
    pub fn first_non_finite(&self) -> Option<(&str, usize)> {
        (0..self.rows()).find_map(|row| {
            self.columns
                .iter()
                .position(|c| !c[row].is_finite())
                .map(|i| (self.headers[i].as_str(), row + 1))
        })
    }

    /// Writes a header row and every value with 17 significant digits.
    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let file = File::create(path).map_err(|e| CliError::io(&path.display().to_string(), e))?;
        let mut writer = csv::Writer::from_writer(file);
        let fail = |e: csv::Error| CliError::Config(format!("{}: {e}", path.display()));
        writer.write_record(&self.headers).map_err(fail)?;
        for row in 0..self.rows() {
            writer
                .write_record(self.columns.iter().map(|c| format!("{:.16e}", c[row])))
                .map_err(fail)?;
        }
        writer
            .into_inner()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            .flush()
            .map_err(|e| CliError::io(&path.display().to_string(), e))
    }

    /// Reads a CSV written by [`Table::write_csv`] or by hand. Empty files and
    /// unparsable cells are configuration errors; NaN and infinite values are
    /// numerical errors naming the row.
    pub fn read_csv(path: &Path) -> Result<Table, CliError> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        if headers.iter().all(String::is_empty) {
            return Err(CliError::Config(format!("{}: empty file", path.display())));
        }
        let mut table = Table {
            columns: vec![Vec::new(); headers.len()],
            headers,
        };
        for (i, record) in reader.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| CliError::Config(format!("{}: row {row}: {e}", path.display())))?;
            for (j, cell) in record.iter().enumerate() {
                let value: f64 = cell.trim().parse().map_err(|_| {
                    CliError::Config(format!(
                        "{}: row {row}, column {}: cannot parse {cell:?}",
                        path.display(),
                        table.headers[j]
                    ))
                })?;
                table.columns[j].push(value);
            }
        }
        if table.rows() == 0 {
            return Err(CliError::Config(format!("{}: no data rows", path.display())));
        }
        if let Some((column, row)) = table.first_non_finite() {
            return Err(CliError::Numerical(format!(
                "{}: non-finite {column} in data row {row}",
                path.display()
            )));
        }
        Ok(table)
    }
}
