use std::io::Write;

use crate::effective::{magnitude_profile, EffectiveChannel, ElgTable, EnvelopeParams};
use crate::error::Result;

/// Writes `m,exact,upsilon,theta,envelope` for every row of column
/// `carrier`.
pub fn write_profile_csv<W: Write>(eff: &EffectiveChannel, p: &EnvelopeParams, carrier: usize, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in magnitude_profile(eff, p, carrier) {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `iota,factor_db` for every table entry.
pub fn write_elg_csv<W: Write>(table: &ElgTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iota", "factor_db"])?;
    for (i, v) in table.iotas().iter().zip(table.values()) {
        out.write_record([i.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
