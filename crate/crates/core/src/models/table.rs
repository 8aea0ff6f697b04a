//! Plain numeric CSV tables for datasets.

use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::chain::format_real;
use crate::error::{Error, Result};

/// A dense numeric table with named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub values: DMatrix<f64>,
}

impl Table {
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut data = Vec::new();
        let mut rows = 0;
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != headers.len() {
                return Err(Error::domain(format!("row {} has {} fields, expected {}", i + 2, record.len(), headers.len())));
            }
            for (field, name) in record.iter().zip(&headers) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::domain(format!("row {}: column {name} is not a number: {field:?}", i + 2)))?;
                data.push(v);
            }
            rows += 1;
        }
        let values = DMatrix::from_row_slice(rows, headers.len(), &data);
        Self::new(headers, values)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.headers.join(","))?;
        for i in 0..self.values.nrows() {
            let row: Vec<String> = self.values.row(i).iter().map(|&v| format_real(v)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Columns named `prefix1, prefix2, …` in numeric order; may be empty.
    pub fn numbered(&self, prefix: &str) -> DMatrix<f64> {
        let mut cols = Vec::new();
        for i in 1.. {
            match self.headers.iter().position(|h| *h == format!("{prefix}{i}")) {
                Some(j) => cols.push(j),
                None => break,
            }
        }
        DMatrix::from_fn(self.values.nrows(), cols.len(), |i, j| self.values[(i, cols[j])])
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::domain(format!("missing column {name}")))?;
        Ok(self.values.column(j).iter().copied().collect())
    }

    pub fn new(headers: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if headers.len() != values.ncols() {
            return Err(Error::domain(format!("{} headers for {} columns", headers.len(), values.ncols())));
        }
        Ok(Self { headers, values })
    }
}

/// Matrices with equal row counts placed side by side.
pub fn hstack(blocks: &[&DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let n = blocks.first().map_or(0, |b| b.nrows());
    if blocks.iter().any(|b| b.nrows() != n) {
        return Err(Error::domain("blocks have different row counts"));
    }
    let total: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(n, total);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_bits() {
        let x = DMatrix::from_row_slice(2, 2, &[0.1, 1.0 / 3.0, -2.5e-7, 4.0]);
        let y = DMatrix::from_column_slice(2, 1, &[1e300, -0.0]);
        let headers = vec!["y".to_string(), "x1".to_string(), "x2".to_string()];
        let t = Table::new(headers, hstack(&[&y, &x]).unwrap()).unwrap();
        assert_eq!(t.headers, vec!["y", "x1", "x2"]);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        let back = Table::read(&buf[..]).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.numbered("x"), x);
        assert_eq!(back.numbered("z").ncols(), 0);
    }

    #[test]
    fn bad_cells_are_reported() {
        let err = Table::read("a,b\n1,zz\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains('b'));
    }
}
