//! System parameters, scenario selection and the plain-text config format.
//!
//! The config document is one `key = value` per line with `#` comments. Keys
//! are exactly the [`SystemParams`] field names (hardware-impairment fields
//! flattened) plus `scenario`, `seed` and `trials`. Unknown keys are
//! rejected, and every range violation names the offending key.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SimError};
use crate::units;

/// RIS hardware-impairment parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwiParams {
    /// Reflection amplitude coefficient, in (0, 1].
    pub alpha: f64,
    /// Transmitter distortion severity.
    pub kappa_t: f64,
    /// Receiver distortion severity.
    pub kappa_r: f64,
    /// Phase of the direct-link channel term, radians.
    pub phi_bu: f64,
}

impl Default for HwiParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            kappa_t: 0.05 * 0.05,
            kappa_r: 0.05 * 0.05,
            phi_bu: FRAC_PI_4,
        }
    }
}

/// Unit-tagged system parameters shared by all scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub carrier_freq_ghz: f64,
    pub bandwidth_hz: f64,
    pub bs_power_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub n_bs_antennas: usize,
    pub n_ncr_antennas_per_side: usize,
    pub n_ris_elements: usize,
    pub ncr_gain_db: f64,
    /// Maximum repeater output power; `None` disables the clamp.
    pub ncr_max_out_dbm: Option<f64>,
    pub bs_gain_dbi: f64,
    pub node_gain_dbi: f64,
    pub ue_gain_dbi: f64,
    /// Number of multipath components L.
    pub n_paths: usize,
    pub hwi: HwiParams,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            carrier_freq_ghz: 28.0,
            bandwidth_hz: 1e9,
            bs_power_dbm: 43.0,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 10.0,
            n_bs_antennas: 16,
            n_ncr_antennas_per_side: 8,
            n_ris_elements: 100,
            ncr_gain_db: 100.0,
            ncr_max_out_dbm: None,
            bs_gain_dbi: 18.0,
            node_gain_dbi: 18.0,
            ue_gain_dbi: 0.0,
            n_paths: 3,
            hwi: HwiParams::default(),
        }
    }
}

impl SystemParams {
    /// Receiver noise variance in mW over the configured bandwidth.
    pub fn noise_power_mw(&self) -> f64 {
        let dbm = self.noise_psd_dbm_hz + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db;
        units::db_lin(dbm)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("carrier_freq_ghz", self.carrier_freq_ghz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("bs_power_dbm", self.bs_power_dbm),
            ("noise_psd_dbm_hz", self.noise_psd_dbm_hz),
            ("noise_figure_db", self.noise_figure_db),
            ("ncr_gain_db", self.ncr_gain_db),
            ("bs_gain_dbi", self.bs_gain_dbi),
            ("node_gain_dbi", self.node_gain_dbi),
            ("ue_gain_dbi", self.ue_gain_dbi),
            ("alpha", self.hwi.alpha),
            ("kappa_t", self.hwi.kappa_t),
            ("kappa_r", self.hwi.kappa_r),
            ("phi_bu", self.hwi.phi_bu),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(SimError::RangeViolation {
                    key: key.into(),
                    reason: "must be finite".into(),
                });
            }
        }
        if let Some(p) = self.ncr_max_out_dbm {
            if !p.is_finite() {
                return Err(SimError::RangeViolation {
                    key: "ncr_max_out_dbm".into(),
                    reason: "must be finite".into(),
                });
            }
        }
        if self.carrier_freq_ghz <= 0.0 {
            return Err(SimError::RangeViolation {
                key: "carrier_freq_ghz".into(),
                reason: "must be positive".into(),
            });
        }
        if self.bandwidth_hz <= 0.0 {
            return Err(SimError::RangeViolation {
                key: "bandwidth_hz".into(),
                reason: "must be positive".into(),
            });
        }
        for (key, v) in [
            ("n_bs_antennas", self.n_bs_antennas),
            ("n_ncr_antennas_per_side", self.n_ncr_antennas_per_side),
            ("n_ris_elements", self.n_ris_elements),
            ("n_paths", self.n_paths),
        ] {
            if v == 0 {
                return Err(SimError::RangeViolation {
                    key: key.into(),
                    reason: "must be at least 1".into(),
                });
            }
        }
        if !(self.hwi.alpha > 0.0 && self.hwi.alpha <= 1.0) {
            return Err(SimError::RangeViolation {
                key: "alpha".into(),
                reason: "must lie in (0, 1]".into(),
            });
        }
        if self.hwi.kappa_t < 0.0 {
            return Err(SimError::RangeViolation {
                key: "kappa_t".into(),
                reason: "must be nonnegative".into(),
            });
        }
        if self.hwi.kappa_r < 0.0 {
            return Err(SimError::RangeViolation {
                key: "kappa_r".into(),
                reason: "must be nonnegative".into(),
            });
        }
        Ok(())
    }
}

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum ScenarioKind {
    /// UE rate vs BS transmit power, single link.
    Fig3,
    /// Required surface size to match the repeater, per antenna count.
    Fig4,
    /// Blockage bypass along a UE track.
    Fig5,
    /// Two-cell repeater interference.
    Fig7,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::Fig3,
        ScenarioKind::Fig4,
        ScenarioKind::Fig5,
        ScenarioKind::Fig7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Fig3 => "fig3",
            ScenarioKind::Fig4 => "fig4",
            ScenarioKind::Fig5 => "fig5",
            ScenarioKind::Fig7 => "fig7",
        }
    }

    /// Stable integer tag used in rng substream derivation.
    pub(crate) fn tag(self) -> u64 {
        match self {
            ScenarioKind::Fig3 => 3,
            ScenarioKind::Fig4 => 4,
            ScenarioKind::Fig5 => 5,
            ScenarioKind::Fig7 => 7,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3" => Ok(ScenarioKind::Fig3),
            "fig4" => Ok(ScenarioKind::Fig4),
            "fig5" => Ok(ScenarioKind::Fig5),
            "fig7" => Ok(ScenarioKind::Fig7),
            _ => Err(SimError::RangeViolation {
                key: "scenario".into(),
                reason: format!("unknown scenario \"{s}\"; valid: fig3, fig4, fig5, fig7"),
            }),
        }
    }
}

/// Run descriptor carried alongside [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub trials: usize,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: usize = 200;

/// Partially-resolved document; the CLI merges flags over this.
#[derive(Debug, Clone, Default)]
pub struct ParsedConfig {
    pub params: SystemParams,
    pub scenario: Option<ScenarioKind>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

/// Per-scenario parameter defaults; a config document overrides these.
///
/// The two-cell study runs with 10 repeater antennas per side, the others
/// with the global defaults.
pub fn preset_params(kind: ScenarioKind) -> SystemParams {
    let mut p = SystemParams::default();
    if kind == ScenarioKind::Fig7 {
        p.n_ncr_antennas_per_side = 10;
    }
    p
}

fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw.parse().map_err(|_| SimError::RangeViolation {
        key: key.into(),
        reason: format!("not a number: \"{raw}\""),
    })?;
    if !v.is_finite() {
        return Err(SimError::RangeViolation {
            key: key.into(),
            reason: "must be finite".into(),
        });
    }
    Ok(v)
}

fn parse_usize(key: &str, raw: &str) -> Result<usize> {
    raw.parse().map_err(|_| SimError::RangeViolation {
        key: key.into(),
        reason: format!("not a positive integer: \"{raw}\""),
    })
}

/// Parses a config document without requiring the `scenario` key.
pub fn parse_config_document(text: &str) -> Result<ParsedConfig> {
    parse_config_document_onto(text, SystemParams::default())
}

/// Parses a config document over an explicit parameter base (used to apply
/// documents on top of scenario presets).
pub fn parse_config_document_onto(text: &str, base: SystemParams) -> Result<ParsedConfig> {
    let mut cfg = ParsedConfig { params: base, ..ParsedConfig::default() };
    let mut seen: Vec<String> = Vec::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| SimError::ConfigParse {
            line: lineno + 1,
            message: format!("expected `key = value`, got \"{line}\""),
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(SimError::ConfigParse {
                line: lineno + 1,
                message: format!("empty value for key \"{key}\""),
            });
        }
        if seen.iter().any(|k| k == key) {
            return Err(SimError::ConfigParse {
                line: lineno + 1,
                message: format!("duplicate key \"{key}\""),
            });
        }
        seen.push(key.to_string());

        let p = &mut cfg.params;
        match key {
            "carrier_freq_ghz" => p.carrier_freq_ghz = parse_f64(key, value)?,
            "bandwidth_hz" => p.bandwidth_hz = parse_f64(key, value)?,
            "bs_power_dbm" => p.bs_power_dbm = parse_f64(key, value)?,
            "noise_psd_dbm_hz" => p.noise_psd_dbm_hz = parse_f64(key, value)?,
            "noise_figure_db" => p.noise_figure_db = parse_f64(key, value)?,
            "n_bs_antennas" => p.n_bs_antennas = parse_usize(key, value)?,
            "n_ncr_antennas_per_side" => p.n_ncr_antennas_per_side = parse_usize(key, value)?,
            "n_ris_elements" => p.n_ris_elements = parse_usize(key, value)?,
            "ncr_gain_db" => p.ncr_gain_db = parse_f64(key, value)?,
            "ncr_max_out_dbm" => p.ncr_max_out_dbm = Some(parse_f64(key, value)?),
            "bs_gain_dbi" => p.bs_gain_dbi = parse_f64(key, value)?,
            "node_gain_dbi" => p.node_gain_dbi = parse_f64(key, value)?,
            "ue_gain_dbi" => p.ue_gain_dbi = parse_f64(key, value)?,
            "n_paths" => p.n_paths = parse_usize(key, value)?,
            "alpha" => p.hwi.alpha = parse_f64(key, value)?,
            "kappa_t" => p.hwi.kappa_t = parse_f64(key, value)?,
            "kappa_r" => p.hwi.kappa_r = parse_f64(key, value)?,
            "phi_bu" => p.hwi.phi_bu = parse_f64(key, value)?,
            "scenario" => cfg.scenario = Some(value.parse()?),
            "seed" => {
                cfg.seed = Some(value.parse().map_err(|_| SimError::RangeViolation {
                    key: "seed".into(),
                    reason: format!("not a u64: \"{value}\""),
                })?)
            }
            "trials" => {
                let t = parse_usize(key, value)?;
                if t == 0 {
                    return Err(SimError::RangeViolation {
                        key: "trials".into(),
                        reason: "must be at least 1".into(),
                    });
                }
                cfg.trials = Some(t);
            }
            _ => return Err(SimError::UnknownKey { key: key.into() }),
        }
    }
    cfg.params.validate()?;
    Ok(cfg)
}

/// Loads a full scenario configuration; `scenario` is the one required key.
pub fn load_scenario_config(text: &str) -> Result<(SystemParams, RunConfig)> {
    let cfg = parse_config_document(text)?;
    let scenario = cfg.scenario.ok_or(SimError::MissingKey { key: "scenario" })?;
    Ok((
        cfg.params,
        RunConfig {
            scenario,
            seed: cfg.seed.unwrap_or(DEFAULT_SEED),
            trials: cfg.trials.unwrap_or(DEFAULT_TRIALS),
        },
    ))
}

/// Canonical serialization; reloading the output reproduces the inputs.
pub fn serialize_config(params: &SystemParams, run: &RunConfig) -> String {
    let mut s = String::new();
    s.push_str(&format!("scenario = {}\n", run.scenario));
    s.push_str(&format!("seed = {}\n", run.seed));
    s.push_str(&format!("trials = {}\n", run.trials));
    s.push_str(&format!("carrier_freq_ghz = {}\n", params.carrier_freq_ghz));
    s.push_str(&format!("bandwidth_hz = {}\n", params.bandwidth_hz));
    s.push_str(&format!("bs_power_dbm = {}\n", params.bs_power_dbm));
    s.push_str(&format!("noise_psd_dbm_hz = {}\n", params.noise_psd_dbm_hz));
    s.push_str(&format!("noise_figure_db = {}\n", params.noise_figure_db));
    s.push_str(&format!("n_bs_antennas = {}\n", params.n_bs_antennas));
    s.push_str(&format!(
        "n_ncr_antennas_per_side = {}\n",
        params.n_ncr_antennas_per_side
    ));
    s.push_str(&format!("n_ris_elements = {}\n", params.n_ris_elements));
    s.push_str(&format!("ncr_gain_db = {}\n", params.ncr_gain_db));
    if let Some(p) = params.ncr_max_out_dbm {
        s.push_str(&format!("ncr_max_out_dbm = {p}\n"));
    }
    s.push_str(&format!("bs_gain_dbi = {}\n", params.bs_gain_dbi));
    s.push_str(&format!("node_gain_dbi = {}\n", params.node_gain_dbi));
    s.push_str(&format!("ue_gain_dbi = {}\n", params.ue_gain_dbi));
    s.push_str(&format!("n_paths = {}\n", params.n_paths));
    s.push_str(&format!("alpha = {}\n", params.hwi.alpha));
    s.push_str(&format!("kappa_t = {}\n", params.hwi.kappa_t));
    s.push_str(&format!("kappa_r = {}\n", params.hwi.kappa_r));
    s.push_str(&format!("phi_bu = {}\n", params.hwi.phi_bu));
    s
}
