//! CSV tables: comma-delimited, LF line endings, numbers with 12
//! significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use crate::Error;

/// `%.12g`: shortest of fixed or exponent notation with trailing zeros
/// removed; −0 is written as 0.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| format_number(v)))?;
        }
        w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
    }
}

/// Writes tables into `dir`; if any write fails, every file written so far
/// is removed.
pub fn write_tables(dir: &Path, tables: &[Table]) -> Result<Vec<PathBuf>, Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut written = Vec::new();
    for table in tables {
        let path = dir.join(format!("{}.csv", table.name));
        let result = table
            .to_csv()
            .map_err(|e| Error::Csv {
                path: path.clone(),
                source: e,
            })
            .and_then(|bytes| {
                fs::write(&path, bytes).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })
            });
        // Registered first so a partial file is cleaned up as well.
        written.push(path);
        if let Err(e) = result {
            remove_all(&written);
            return Err(e);
        }
    }
    Ok(written)
}

pub fn remove_all(paths: &[PathBuf]) {
    for p in paths {
        let _ = fs::remove_file(p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_number(-2.5e-7), "-2.5e-07");
        assert_eq!(format_number(6.02214076e23), "6.02214076e+23");
        assert_eq!(format_number(123456789012.0), "123456789012");
        assert_eq!(format_number(1234567890123.0), "1.23456789012e+12");
        assert_eq!(format_number(0.00012345), "0.00012345");
        assert_eq!(format_number(f64::NAN), "nan");
    }

    #[test]
    fn csv_uses_lf_and_header() {
        let mut t = Table::new("x", &["a_ghz", "b"]);
        t.push(vec![1.5, -0.0]);
        t.push(vec![2.0, 1e-20]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text, "a_ghz,b\n1.5,0\n2,1e-20\n");
    }

    #[test]
    fn failed_write_leaves_no_files() {
        let dir = tempfile::tempdir().unwrap();
        let good = Table::new("good", &["a"]);
        // A directory with the target name makes the second write fail.
        fs::create_dir(dir.path().join("bad.csv")).unwrap();
        let bad = Table::new("bad", &["a"]);
        assert!(write_tables(dir.path(), &[good, bad]).is_err());
        assert!(!dir.path().join("good.csv").exists());
    }

    proptest! {
        #[test]
        fn round_trips_to_twelve_digits(v in -1e30f64..1e30) {
            let back: f64 = format_number(v).parse().unwrap();
            prop_assert!((back - v).abs() <= 1e-11 * v.abs());
        }
    }
}
