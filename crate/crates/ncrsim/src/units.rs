//! dB/dBm conversions and noise power.
//!
//! All internal power arithmetic in this crate is carried out in linear
//! milliwatts; decibel quantities appear only at the configuration and
//! reporting boundaries. These functions are that boundary.

use crate::error::{Result, SimError};

/// `10^(x/10)` without input checking, for values already validated.
#[inline]
pub(crate) fn db_lin(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Converts a dB ratio to a linear power ratio.
pub fn db_to_linear(x_db: f64) -> Result<f64> {
    if !x_db.is_finite() {
        return Err(SimError::NonFinite { what: "dB ratio" });
    }
    Ok(db_lin(x_db))
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(ratio: f64) -> Result<f64> {
    if !ratio.is_finite() {
        return Err(SimError::NonFinite { what: "linear ratio" });
    }
    if ratio <= 0.0 {
        return Err(SimError::OutOfRange {
            what: "linear ratio",
            reason: "must be positive",
        });
    }
    Ok(10.0 * ratio.log10())
}

/// Converts dBm to milliwatts.
pub fn dbm_to_mw(p_dbm: f64) -> Result<f64> {
    if !p_dbm.is_finite() {
        return Err(SimError::NonFinite { what: "dBm power" });
    }
    Ok(db_lin(p_dbm))
}

/// Converts milliwatts to dBm.
pub fn mw_to_dbm(p_mw: f64) -> Result<f64> {
    if !p_mw.is_finite() {
        return Err(SimError::NonFinite { what: "mW power" });
    }
    if p_mw <= 0.0 {
        return Err(SimError::OutOfRange {
            what: "mW power",
            reason: "must be positive",
        });
    }
    Ok(10.0 * p_mw.log10())
}

/// Total receiver noise power in dBm over `bandwidth_hz`:
/// `psd + 10 log10(bandwidth) + noise figure`.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64, psd_dbm_hz: f64) -> Result<f64> {
    if !bandwidth_hz.is_finite() || !noise_figure_db.is_finite() || !psd_dbm_hz.is_finite() {
        return Err(SimError::NonFinite { what: "noise power input" });
    }
    if bandwidth_hz <= 0.0 {
        return Err(SimError::OutOfRange {
            what: "bandwidth_hz",
            reason: "must be positive",
        });
    }
    Ok(psd_dbm_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db)
}
