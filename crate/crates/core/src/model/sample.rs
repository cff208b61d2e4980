//! Observation matrices and their CSV representation.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// An `n × m` matrix of finite observations, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    names: Option<Vec<String>>,
    degenerate: Vec<bool>,
}

impl SampleMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows < 2 {
            return Err(Error::DegenerateData(format!("a sample needs at least 2 rows, got {rows}")));
        }
        if cols < 2 {
            return Err(Error::InvalidParameter(format!("a sample needs at least 2 columns, got {cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "expected {} values for a {rows}x{cols} sample, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse {
                row: k / cols + 1,
                column: k % cols + 1,
                message: format!("non-finite value {}", data[k]),
            });
        }
        let degenerate = (0..cols)
            .map(|j| {
                let first = data[j];
                (0..rows).all(|i| data[i * cols + j] == first)
            })
            .collect();
        Ok(SampleMatrix { rows, cols, data, names: None, degenerate })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if let Some(i) = rows.iter().position(|r| r.as_ref().len() != cols) {
            return Err(Error::InvalidParameter(format!("row {i} has a different length")));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::from_row_major(rows.len(), cols, data)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.cols {
            return Err(Error::InvalidParameter(format!("{} names for {} columns", names.len(), self.cols)));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }
    pub fn ncols(&self) -> usize {
        self.cols
    }
    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Flags of columns whose values are all equal.
    pub fn degenerate_columns(&self) -> &[bool] {
        &self.degenerate
    }

    pub fn has_degenerate_column(&self) -> bool {
        self.degenerate.iter().any(|&d| d)
    }

    pub fn column_min(&self) -> Vec<f64> {
        (0..self.cols).map(|j| self.column(j).into_iter().fold(f64::INFINITY, f64::min)).collect()
    }

    pub fn column_max(&self) -> Vec<f64> {
        (0..self.cols).map(|j| self.column(j).into_iter().fold(f64::NEG_INFINITY, f64::max)).collect()
    }

    /// Applies `f(column, value)` to every entry.
    pub fn map(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let data = self.data.iter().enumerate().map(|(k, &v)| f(k % self.cols, v)).collect();
        let mut out = Self::from_row_major(self.rows, self.cols, data)?;
        out.names = self.names.clone();
        Ok(out)
    }

    pub fn negated(&self) -> Self {
        self.map(|_, v| -v).expect("negation keeps values finite")
    }

    /// Subtracts each column's minimum.
    pub fn shifted_to_zero(&self) -> Self {
        let mins = self.column_min();
        self.map(|j, v| v - mins[j]).expect("shift keeps values finite")
    }

    pub fn permute_columns(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.cols {
            return Err(Error::InvalidParameter("column permutation has the wrong length".into()));
        }
        let data = self.rows().flat_map(|r| order.iter().map(move |&j| r[j])).collect();
        Self::from_row_major(self.rows, self.cols, data)
    }

    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.rows {
            return Err(Error::InvalidParameter("row permutation has the wrong length".into()));
        }
        let data = order.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        Self::from_row_major(self.rows, self.cols, data)
    }

    /// Contiguous block of rows `[start, end)`.
    pub fn row_block(&self, start: usize, end: usize) -> Result<Self> {
        Self::from_row_major(end - start, self.cols, self.data[start * self.cols..end * self.cols].to_vec())
    }

    /// Reads a comma-separated table: a header row followed by numeric rows.
    /// Errors carry the 1-based line and column of the offending field.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Parse { row: 1, column: 0, message: e.to_string() })?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let cols = header.len();
        let mut data = Vec::new();
        let mut rows = 0usize;
        for (idx, record) in rdr.records().enumerate() {
            let line = idx + 2;
            let record = record.map_err(|e| Error::Parse { row: line, column: 0, message: e.to_string() })?;
            if record.len() != cols {
                return Err(Error::Parse {
                    row: line,
                    column: record.len().min(cols) + 1,
                    message: format!("expected {cols} fields, found {}", record.len()),
                });
            }
            for (j, field) in record.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                    row: line,
                    column: j + 1,
                    message: format!("not a number: {field:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        row: line,
                        column: j + 1,
                        message: format!("non-finite value {field:?}"),
                    });
                }
                data.push(v);
            }
            rows += 1;
        }
        if cols < 2 {
            return Err(Error::Parse { row: 1, column: 1, message: format!("need at least 2 columns, found {cols}") });
        }
        Self::from_row_major(rows, cols, data)?.with_names(header)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file =
            std::fs::File::open(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    /// Writes the header (names or `x1..xm`) and rows with shortest
    /// round-trip formatting.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let header: Vec<String> = match &self.names {
            Some(n) => n.clone(),
            None => (1..=self.cols).map(|j| format!("x{j}")).collect(),
        };
        w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
        for r in self.rows() {
            w.write_record(r.iter().map(|v| format!("{v:?}"))).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}
