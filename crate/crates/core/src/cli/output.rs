//! CSV and JSON writers. Floats carry 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Version of the CSV column layouts, echoed in every manifest.
pub const SCHEMA_VERSION: &str = "1";

pub const SPECTRUM_COLUMNS: [&str; 6] = ["index", "E_re", "E_im", "residual", "cluster", "multiplicity"];
pub const TRAJECTORY_COLUMNS: [&str; 8] =
    ["kappa_re", "kappa_im", "theta_re", "theta_im", "E_re", "E_im", "cluster_spread", "residual"];
pub const THETA_COLUMNS: [&str; 5] = ["theta_re", "theta_im", "E_re", "E_im", "deviation"];
pub const LEVELS_COLUMNS: [&str; 3] = ["energy", "multiplicity", "labels"];

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvSink {
    w: csv::Writer<File>,
}

impl CsvSink {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(header)?;
        Ok(Self { w })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        self.w.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
