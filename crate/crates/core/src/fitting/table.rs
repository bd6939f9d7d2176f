use crate::error::{ensure_finite, invalid, Result};

/// Cavity linewidth and mode splitting measured at one wavelength. All three
/// figures are stored as given (wavelength in m, rates in rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityTableRow {
    pub wavelength: f64,
    pub kappa: f64,
    pub lambda_split: f64,
}

/// κ(λ) and Λ(λ) from measurements, linearly interpolated and clamped to the
/// table ends.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityTable {
    rows: Vec<CavityTableRow>,
}

impl CavityTable {
    pub fn new(mut rows: Vec<CavityTableRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(invalid("cavity_table", "table is empty"));
        }
        for r in &rows {
            ensure_finite("wavelength", r.wavelength)?;
            ensure_finite("kappa", r.kappa)?;
            ensure_finite("lambda_split", r.lambda_split)?;
            if r.kappa <= 0.0 {
                return Err(invalid("kappa", format!("must be positive, got {}", r.kappa)));
            }
        }
        rows.sort_by(|a, b| a.wavelength.total_cmp(&b.wavelength));
        if rows.windows(2).any(|w| w[0].wavelength == w[1].wavelength) {
            return Err(invalid("wavelength", "duplicate wavelength in table"));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[CavityTableRow] {
        &self.rows
    }

    /// (κ, Λ) at `wavelength`.
    pub fn at(&self, wavelength: f64) -> (f64, f64) {
        let r = &self.rows;
        if wavelength <= r[0].wavelength {
            return (r[0].kappa, r[0].lambda_split);
        }
        let last = r[r.len() - 1];
        if wavelength >= last.wavelength {
            return (last.kappa, last.lambda_split);
        }
        let i = r.partition_point(|row| row.wavelength <= wavelength) - 1;
        let f = (wavelength - r[i].wavelength) / (r[i + 1].wavelength - r[i].wavelength);
        (
            r[i].kappa + f * (r[i + 1].kappa - r[i].kappa),
            r[i].lambda_split + f * (r[i + 1].lambda_split - r[i].lambda_split),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(w: f64, k: f64, s: f64) -> CavityTableRow {
        CavityTableRow {
            wavelength: w,
            kappa: k,
            lambda_split: s,
        }
    }

    #[test]
    fn interpolates_and_clamps() {
        let t = CavityTable::new(vec![row(2.0, 20.0, 4.0), row(1.0, 10.0, 2.0)]).unwrap();
        assert_eq!(t.at(1.5), (15.0, 3.0));
        assert_eq!(t.at(0.0), (10.0, 2.0));
        assert_eq!(t.at(9.0), (20.0, 4.0));
        assert_eq!(t.at(2.0), (20.0, 4.0));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(CavityTable::new(vec![]).is_err());
        assert!(CavityTable::new(vec![row(1.0, 0.0, 0.0)]).is_err());
        assert!(CavityTable::new(vec![row(1.0, 1.0, 0.0), row(1.0, 2.0, 0.0)]).is_err());
    }
}
