//! Per-generation metrics and the CSV file they stream into.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

pub const CSV_HEADER: &str = "gen,best,mean,min,dict_size,params,lambda,seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: u32,
    pub best: f64,
    pub mean: f64,
    pub min: f64,
    pub dict_size: usize,
    pub params: usize,
    pub lambda: usize,
    pub seconds: f64,
}

impl GenerationRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{},{},{},{:.3}",
            self.generation,
            self.best,
            self.mean,
            self.min,
            self.dict_size,
            self.params,
            self.lambda,
            self.seconds
        )
    }
}

/// Single-writer append-only CSV stream, flushed per row so partial runs
/// still leave usable metrics behind.
pub struct MetricsWriter {
    out: BufWriter<File>,
}

impl MetricsWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{CSV_HEADER}")?;
        out.flush()?;
        Ok(Self { out })
    }

    pub fn append(&mut self, record: &GenerationRecord) -> Result<()> {
        writeln!(self.out, "{}", record.to_csv_row())?;
        self.out.flush()?;
        Ok(())
    }
}
