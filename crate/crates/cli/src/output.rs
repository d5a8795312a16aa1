//! CSV writers. Floats carry 17 significant digits so reruns compare byte for byte.

use std::fs::File;
use std::path::Path;

use csv::Writer;
use orlicz_core::VerificationReport;

use crate::error::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn writer(path: &Path) -> Result<Writer<File>, CliError> {
    Ok(Writer::from_path(path)?)
}

pub fn write_reports(path: &Path, rows: &[VerificationReport]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["check", "phi", "n", "case_id", "lhs", "rhs", "ratio", "pass", "witness"])?;
    for r in rows {
        w.write_record([
            r.check.clone(),
            r.phi.clone(),
            r.n.to_string(),
            r.case_id.clone(),
            num(r.lhs),
            num(r.rhs),
            num(r.ratio),
            r.pass.to_string(),
            r.witness.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows that are soft, carry a note, or failed to compute.
pub fn write_notes(path: &Path, rows: &[VerificationReport]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["check", "phi", "n", "case_id", "hard", "pass", "error", "note"])?;
    for r in rows.iter().filter(|r| !r.hard || r.error.is_some() || r.note.is_some()) {
        w.write_record([
            r.check.clone(),
            r.phi.clone(),
            r.n.to_string(),
            r.case_id.clone(),
            r.hard.to_string(),
            r.pass.to_string(),
            r.error.clone().unwrap_or_default(),
            r.note.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
