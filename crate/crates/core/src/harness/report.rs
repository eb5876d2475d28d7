use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{EstimatorKind, ExperimentConfig};
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the CSV report.
pub const CSV_HEADER: [&str; 9] =
    ["estimator", "snr_db", "ep_ei_db", "C", "delay_rmse", "doppler_rmse", "trials", "mean_pspr", "wall_ms"];

/// Statistics of one `(estimator, SNR, E_p/E_i, C)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseRow {
    pub estimator: EstimatorKind,
    pub snr_db: f64,
    pub ep_ei_db: f64,
    #[serde(rename = "C")]
    pub c: usize,
    /// Samples.
    pub delay_rmse: f64,
    /// Subcarrier spacings, scored on the circle.
    pub doppler_rmse: f64,
    pub trials: usize,
    /// Mean linear PSPR over trials where it is finite; absent for
    /// estimators that do not compute it.
    pub mean_pspr: Option<f64>,
    pub wall_ms: f64,
    pub delay_rmse_se: f64,
    pub doppler_rmse_se: f64,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    estimator: &'a str,
    snr_db: f64,
    ep_ei_db: f64,
    c: usize,
    delay_rmse: f64,
    doppler_rmse: f64,
    trials: usize,
    mean_pspr: Option<f64>,
    wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub rows: Vec<RmseRow>,
}

impl RmseReport {
    pub fn new(config: ExperimentConfig, rows: Vec<RmseRow>) -> Self {
        Self { schema_version: SCHEMA_VERSION, config, rows }
    }

    pub fn row(&self, estimator: EstimatorKind, snr_db: f64, ep_ei_db: f64, c: usize) -> Option<&RmseRow> {
        self.rows
            .iter()
            .find(|r| r.estimator == estimator && r.snr_db == snr_db && r.ep_ei_db == ep_ei_db && r.c == c)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        out.write_record(CSV_HEADER)?;
        for r in &self.rows {
            out.serialize(CsvRow {
                estimator: r.estimator.name(),
                snr_db: r.snr_db,
                ep_ei_db: r.ep_ei_db,
                c: r.c,
                delay_rmse: r.delay_rmse,
                doppler_rmse: r.doppler_rmse,
                trials: r.trials,
                mean_pspr: r.mean_pspr,
                wall_ms: r.wall_ms,
            })?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    /// Writes `<prefix>.csv` and `<prefix>.json`; returns both paths.
    pub fn emit(&self, prefix: &Path) -> Result<(PathBuf, PathBuf)> {
        if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let csv_path = prefix.with_extension("csv");
        let json_path = prefix.with_extension("json");
        self.write_csv(std::fs::File::create(&csv_path)?)?;
        let mut f = std::fs::File::create(&json_path)?;
        self.write_json(&mut f)?;
        f.write_all(b"\n")?;
        Ok((csv_path, json_path))
    }
}

/// The CSV with the `wall_ms` column blanked, for run-to-run comparison.
pub fn csv_without_wall_time(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|line| match line.rsplit_once(',') {
            Some((head, _)) => format!("{head},"),
            None => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}
