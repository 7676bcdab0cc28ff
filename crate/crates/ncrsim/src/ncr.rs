//! Amplify-and-forward repeater link budget.
//!
//! Signal power `S = P g gamma_bn gamma_nu`, noise `NP = sigma_U^2 +
//! sigma_N^2 g gamma_nu`; the output-power cap replaces g with
//! `g_eff = Phat / (sigma_N^2 + P gamma_bn)` whenever the desired output
//! would exceed the cap. Effective channel gains are power gains
//! `|r^H H t|^2` with unit-norm beams.

use crate::beamforming::BeamPair;
use crate::error::{Result, SimError};
use crate::matrix::ComplexMatrix;
use crate::units::{db_lin, dbm_to_mw};

/// Repeater device parameters.
#[derive(Debug, Clone, Copy)]
pub struct NcrParams {
    /// Amplification gain in dB (power gain).
    pub gain_db: f64,
    /// Maximum output power in dBm; `None` disables the cap.
    pub max_out_dbm: Option<f64>,
    /// Noise variance at the repeater input, mW.
    pub sigma_n2_mw: f64,
}

impl NcrParams {
    pub fn new(gain_db: f64, max_out_dbm: Option<f64>, sigma_n2_mw: f64) -> Result<Self> {
        if !gain_db.is_finite() {
            return Err(SimError::NonFinite { what: "gain_db" });
        }
        if let Some(p) = max_out_dbm {
            if !p.is_finite() {
                return Err(SimError::NonFinite { what: "max_out_dbm" });
            }
        }
        if !(sigma_n2_mw > 0.0) {
            return Err(SimError::OutOfRange {
                what: "sigma_n2_mw",
                reason: "must be positive",
            });
        }
        Ok(Self { gain_db, max_out_dbm, sigma_n2_mw })
    }
}

/// One fully-resolved repeater link budget.
#[derive(Debug, Clone, Copy)]
pub struct NcrLinkBudget {
    /// Backhaul effective power gain.
    pub gamma_bn: f64,
    /// Access effective power gain.
    pub gamma_nu: f64,
    /// Amplification actually applied after the output cap.
    pub g_eff: f64,
    pub snr: f64,
    pub rate_bps: f64,
}

/// Beamformed power gain `|rx^H H tx|^2`.
pub fn effective_gain(h: &ComplexMatrix, pair: &BeamPair) -> Result<f64> {
    if pair.tx.rows() != h.cols() || pair.rx.rows() != h.rows() {
        return Err(SimError::DimensionMismatch {
            context: "effective_gain",
            expected: format!("tx {} x 1, rx {} x 1", h.cols(), h.rows()),
            found: format!(
                "tx {} x {}, rx {} x {}",
                pair.tx.rows(),
                pair.tx.cols(),
                pair.rx.rows(),
                pair.rx.cols()
            ),
        });
    }
    let ht = h.mul(&pair.tx)?;
    Ok(pair.rx.vec_dot(&ht)?.norm_sqr())
}

/// Amplification after the output-power cap.
///
/// Uncapped, the repeater would transmit `g (sigma_N^2 + P gamma_bn)`; when
/// that exceeds the cap, the gain is scaled back so the output sits exactly
/// at the cap. Signal and forwarded repeater noise scale together.
pub fn ncr_effective_amplification(p_mw: f64, params: &NcrParams, gamma_bn: f64) -> f64 {
    let g = db_lin(params.gain_db);
    let Some(cap_dbm) = params.max_out_dbm else {
        return g;
    };
    let cap_mw = dbm_to_mw(cap_dbm).expect("validated finite");
    let input = params.sigma_n2_mw + p_mw * gamma_bn;
    if g * input <= cap_mw {
        g
    } else {
        cap_mw / input
    }
}

/// Received SNR at the UE behind an amplify-and-forward repeater.
pub fn ncr_snr(
    p_mw: f64,
    g_eff: f64,
    gamma_bn: f64,
    gamma_nu: f64,
    sigma_n2_mw: f64,
    sigma_u2_mw: f64,
) -> f64 {
    let signal = p_mw * g_eff * gamma_bn * gamma_nu;
    let noise = sigma_u2_mw + sigma_n2_mw * g_eff * gamma_nu;
    signal / noise
}

/// Shannon rate over bandwidth `q_hz` at the given SINR.
pub fn rate_bps(q_hz: f64, sinr: f64) -> f64 {
    q_hz * (1.0 + sinr).log2()
}

/// Convenience: full budget for one repeater hop.
pub fn ncr_link_budget(
    p_mw: f64,
    params: &NcrParams,
    gamma_bn: f64,
    gamma_nu: f64,
    sigma_u2_mw: f64,
    q_hz: f64,
) -> NcrLinkBudget {
    let g_eff = ncr_effective_amplification(p_mw, params, gamma_bn);
    let snr = ncr_snr(p_mw, g_eff, gamma_bn, gamma_nu, params.sigma_n2_mw, sigma_u2_mw);
    NcrLinkBudget {
        gamma_bn,
        gamma_nu,
        g_eff,
        snr,
        rate_bps: rate_bps(q_hz, snr),
    }
}

/// Interference power a repeater leaks toward a victim receiver.
///
/// The repeater forwards `g_eff (P gamma_bn + sigma_N^2)` toward its own
/// user; the victim picks up the fraction `|h_nv tx_beam|^2` of it, scaled
/// by the victim's receive gain (1 for a single-antenna victim).
pub fn ncr_forwarded_interference(
    p_mw: f64,
    g_eff: f64,
    gamma_bn: f64,
    sigma_n2_mw: f64,
    h_nv: &ComplexMatrix,
    tx_beam: &ComplexMatrix,
    victim_rx_gain: f64,
) -> Result<f64> {
    if h_nv.rows() != 1 || tx_beam.cols() != 1 || h_nv.cols() != tx_beam.rows() {
        return Err(SimError::DimensionMismatch {
            context: "ncr_forwarded_interference",
            expected: format!("h_nv 1 x n, tx_beam n x 1 (n = {})", h_nv.cols()),
            found: format!(
                "h_nv {} x {}, tx_beam {} x {}",
                h_nv.rows(),
                h_nv.cols(),
                tx_beam.rows(),
                tx_beam.cols()
            ),
        });
    }
    let leak = h_nv.mul(tx_beam)?.get(0, 0).norm_sqr();
    Ok(g_eff * (p_mw * gamma_bn + sigma_n2_mw) * leak * victim_rx_gain)
}
