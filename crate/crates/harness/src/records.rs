//! RMSE result rows and their CSV encoding.

use std::io::Write;

use aoa_nlos::Method;

use crate::Result;

/// Column header of every result table.
pub const HEADER: &str = "method,p,n,trials,failures,rmse_m";

/// RMSE of one method at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct RmseRecord {
    /// Estimator.
    pub method: Method,
    /// NLOS probability; `None` for datasets.
    pub p: Option<f64>,
    /// Subset size, for `alg1` only.
    pub n: Option<usize>,
    /// Trials attempted.
    pub trials: usize,
    /// Trials where the method returned an error.
    pub failures: usize,
    /// RMSE over the successful trials (m); NaN when every trial failed.
    pub rmse: f64,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes `records` as CSV with [`HEADER`] and LF line endings.
pub fn write_csv<W: Write>(records: &[RmseRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER.split(','))?;
    for r in records {
        w.write_record([
            r.method.id().to_string(),
            opt(r.p),
            opt(r.n),
            r.trials.to_string(),
            r.failures.to_string(),
            r.rmse.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// [`write_csv`] into a string.
pub fn to_csv_string(records: &[RmseRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}
