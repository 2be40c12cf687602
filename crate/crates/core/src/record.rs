//! Versioned output records and the sweep CSV format.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{RunConfig, SweepRow};

pub const SCHEMA_VERSION: &str = "1";

/// Column order of the sweep CSV.
pub const SWEEP_COLUMNS: [&str; 7] = [
    "axis_value",
    "trials",
    "success_rate",
    "mean_fidelity",
    "mean_rows",
    "mean_restarts",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub build_id: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Provenance {
    pub fn now(seed: u64) -> Self {
        Self {
            seed,
            build_id: build_id(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

pub fn build_id() -> String {
    format!("{}-{}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord<R> {
    pub schema_version: String,
    pub config: RunConfig,
    pub results: R,
    pub provenance: Provenance,
}

impl<R> OutputRecord<R> {
    pub fn new(config: RunConfig, results: R) -> Self {
        let provenance = Provenance::now(config.seed);
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            config,
            results,
            provenance,
        }
    }

    pub fn check_version(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        Ok(())
    }
}

/// Sweep rows as CSV, preceded by a `# schema_version=N` comment line.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!(
        "# schema_version={SCHEMA_VERSION}\n{}\n",
        SWEEP_COLUMNS.join(",")
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.axis_value,
            r.trials,
            r.success_rate,
            r.mean_fidelity,
            r.mean_rows,
            r.mean_restarts,
            r.wall_ms
        );
    }
    out
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let bad = |msg: String| Error::Config(format!("sweep CSV: {msg}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(l) if l.trim() == format!("# schema_version={SCHEMA_VERSION}") => {}
        other => return Err(bad(format!("expected schema line, found {other:?}"))),
    }
    match lines.next() {
        Some(h) if h.trim() == SWEEP_COLUMNS.join(",") => {}
        other => return Err(bad(format!("unexpected header {other:?}"))),
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != SWEEP_COLUMNS.len() {
                return Err(bad(format!(
                    "expected {} fields in {line:?}",
                    SWEEP_COLUMNS.len()
                )));
            }
            let num = |i: usize| {
                f[i].parse::<f64>()
                    .map_err(|e| bad(format!("{}: {e}", SWEEP_COLUMNS[i])))
            };
            Ok(SweepRow {
                axis_value: num(0)?,
                trials: f[1].parse().map_err(|e| bad(format!("trials: {e}")))?,
                success_rate: num(2)?,
                mean_fidelity: num(3)?,
                mean_rows: num(4)?,
                mean_restarts: num(5)?,
                wall_ms: num(6)?,
            })
        })
        .collect()
}
