//! CSV emission and the run manifest.
//!
//! One CSV per scenario: header
//! `scenario,sweep_value,method,mean_rate_bps,stderr_rate_bps,trials`,
//! rows sorted by (sweep value, curve label), floats printed with nine
//! significant digits, LF endings, UTF-8, no BOM. Output is byte-stable for
//! a given (config, seed, trials) regardless of worker count.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::config::ScenarioKind;
use crate::error::{Result, SimError};
use crate::scenarios::{CurveAggregate, TrialRecord};

/// Nine significant digits; zero prints as `0.000000000`.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        "0.000000000".to_string()
    } else {
        format!("{v:.8e}")
    }
}

/// Renders aggregate rows as the scenario CSV.
pub fn render_csv(scenario: ScenarioKind, aggregates: &[CurveAggregate]) -> Result<String> {
    if aggregates.is_empty() {
        return Err(SimError::EmptyInput { context: "render_csv" });
    }
    let mut rows: Vec<&CurveAggregate> = aggregates.iter().collect();
    rows.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then_with(|| a.curve.cmp(&b.curve))
    });
    let mut out = String::from("scenario,sweep_value,method,mean_rate_bps,stderr_rate_bps,trials\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            scenario,
            format_sig9(r.sweep_value),
            r.curve,
            format_sig9(r.mean_rate_bps),
            format_sig9(r.stderr_rate_bps),
            r.trials
        ));
    }
    Ok(out)
}

pub fn write_csv(
    scenario: ScenarioKind,
    aggregates: &[CurveAggregate],
    path: &Path,
) -> Result<()> {
    let text = render_csv(scenario, aggregates)?;
    fs::write(path, text)?;
    Ok(())
}

/// Per-trial debug dump (`--raw`).
pub fn render_raw_csv(records: &[TrialRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(SimError::EmptyInput { context: "render_raw_csv" });
    }
    let mut rows: Vec<&TrialRecord> = records.iter().collect();
    rows.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then_with(|| a.curve.cmp(&b.curve))
            .then_with(|| a.trial_index.cmp(&b.trial_index))
    });
    let mut out = String::from("scenario,sweep_value,method,trial_index,rate_bps,sinr_db\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.scenario,
            format_sig9(r.sweep_value),
            r.curve,
            r.trial_index,
            format_sig9(r.rate_bps),
            format_sig9(r.sinr_db)
        ));
    }
    Ok(out)
}

/// SHA-256 of the effective config text, hex-encoded.
pub fn config_digest(config_text: &str) -> String {
    hex::encode(Sha256::digest(config_text.as_bytes()))
}

/// What produced a set of outputs.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub scenario: ScenarioKind,
    pub config_digest: String,
    pub master_seed: u64,
    pub trials: usize,
    pub tool_version: &'static str,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("scenario = {}\n", self.scenario));
        s.push_str(&format!("config_digest = {}\n", self.config_digest));
        s.push_str(&format!("seed = {}\n", self.master_seed));
        s.push_str(&format!("trials = {}\n", self.trials));
        s.push_str(&format!("tool_version = {}\n", self.tool_version));
        for o in &self.outputs {
            s.push_str(&format!("output = {o}\n"));
        }
        s
    }
}
